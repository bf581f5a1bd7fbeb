#pragma once

#include "tdesign/errors.hpp"
#include "tdesign/perm_core.hpp"
#include "tdesign/architecture.hpp"
#include "tdesign/cluster_graph.hpp"
#include "tdesign/decompose.hpp"
#include "tdesign/spectral.hpp"
#include "tdesign/bounds.hpp"
#include "tdesign/search.hpp"
#include "tdesign/json_io.hpp"
