// tdesign: command-line front end for design-depth analysis of circuit architectures.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tdesign/tdesign.hpp"

namespace td = tdesign;
using ojson = nlohmann::ordered_json;

namespace {

struct Common {
    int t = 2;
    double eps = 0.01;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string method = "auto";
    std::size_t dim_guard = td::kDefaultDimGuard;
    long max_matvecs = 100000;
    bool allow_conjectured = false;
    bool stdio = false;
    bool no_timestamp = false;
    std::string out;
    std::string csv;
};

struct Output {
    ojson body;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
};

std::string num(double v) {
    std::ostringstream s;
    s.precision(12);
    s << v;
    return s.str();
}

td::Method parse_method(const std::string& m) {
    if (m == "dense") return td::Method::dense;
    if (m == "iterative") return td::Method::iterative;
    if (m == "auto") return td::Method::automatic;
    throw td::InvalidInput("unknown --method '" + m + "' (dense|iterative|auto)");
}

td::SsvOptions ssv_options(const Common& c) {
    td::SsvOptions o;
    o.method = parse_method(c.method);
    o.max_matvecs = c.max_matvecs;
    if (c.seed_set) o.seed = c.seed;
    return o;
}

/// Reads a JSON input from a path, or from stdin for "-" or --stdio with no path.
nlohmann::json load_json(const std::string& path, const Common& c) {
    std::string text;
    if (path.empty() || path == "-") {
        if (!c.stdio && path.empty()) throw td::InvalidInput("no input given (pass a file or --stdio)");
        text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else {
        text = td::read_file(path);
    }
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw td::InvalidInput(std::string("input JSON: ") + e.what());
    }
}

void add_common(CLI::App* sub, Common& c, bool spectral) {
    sub->add_option("--t", c.t, "moment order t (1..6)")->capture_default_str();
    sub->add_option("--eps", c.eps, "target design accuracy epsilon")->capture_default_str();
    sub->add_option("--seed", c.seed, "random seed")->each([&c](const std::string&) { c.seed_set = true; });
    sub->add_flag("--allow-conjectured", c.allow_conjectured, "let non-rigorous C values be marked tightest");
    sub->add_flag("--stdio", c.stdio, "read input JSON from stdin and write to stdout");
    sub->add_flag("--no-timestamp", c.no_timestamp, "leave the manifest timestamp empty");
    sub->add_option("--out", c.out, "write the JSON artifact here (atomically)");
    sub->add_option("--csv", c.csv, "also write a CSV table here");
    if (spectral) {
        sub->add_option("--method", c.method, "singular value method: dense|iterative|auto")->capture_default_str();
        sub->add_option("--dim-guard", c.dim_guard, "maximum operator dimension")->capture_default_str();
        sub->add_option("--max-matvecs", c.max_matvecs, "Lanczos matvec cap")->capture_default_str();
    }
}

td::RunManifest manifest(const std::string& sub, const Common& c, std::vector<std::string> inputs,
                         std::map<std::string, std::string> extra) {
    td::RunManifest m;
    m.subcommand = sub;
    m.inputs = std::move(inputs);
    m.parameters = std::move(extra);
    m.parameters["t"] = std::to_string(c.t);
    m.parameters["eps"] = num(c.eps);
    m.parameters["method"] = c.method;
    m.parameters["dim_guard"] = std::to_string(c.dim_guard);
    m.parameters["allow_conjectured"] = c.allow_conjectured ? "true" : "false";
    if (c.seed_set) m.seed = c.seed;
    if (!c.no_timestamp) m.timestamp = td::utc_timestamp();
    return m;
}

std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string q = "\"";
    for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

void emit(const td::RunManifest& m, Output& o, const Common& c) {
    ojson doc;
    doc["manifest"] = td::to_json(m);
    for (auto& [k, v] : o.body.items()) doc[k] = v;
    const std::string text = doc.dump(2) + "\n";
    if (!c.out.empty() && !c.stdio)
        td::write_atomic(c.out, text);
    else
        std::cout << text;
    if (!c.csv.empty()) {
        std::ostringstream s;
        for (std::size_t i = 0; i < o.csv_header.size(); ++i) s << (i ? "," : "") << o.csv_header[i];
        s << "\n";
        for (const auto& row : o.csv_rows) {
            for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << csv_field(row[i]);
            s << "\n";
        }
        td::write_atomic(c.csv, s.str());
    }
}

ojson arch_summary(const td::Architecture& a) {
    ojson j;
    j["N"] = a.num_sites;
    j["q"] = a.local_dim;
    j["depth"] = a.depth();
    j["periodic_depth"] = a.periodic_depth ? ojson(*a.periodic_depth) : ojson(nullptr);
    j["complete"] = td::is_complete(a);
    j["connected"] = td::is_connected(a);
    return j;
}

void bound_rows(Output& o, const std::vector<td::BoundReport>& reports, const std::string& label) {
    for (const auto& r : reports)
        o.csv_rows.push_back({label, std::to_string(r.num_sites), num(r.q), std::to_string(r.t), num(r.eps),
                              td::to_string(r.path), num(r.s_star), num(r.k_star), std::to_string(r.k_star_ceil),
                              r.d_star ? std::to_string(*r.d_star) : "", num(r.depth_estimate),
                              r.tightest ? "1" : "0", r.conjectured ? "1" : "0"});
}

const std::vector<std::string> kBoundHeader = {"label", "N", "q", "t", "eps", "path", "s_star", "k_star",
                                               "k_star_ceil", "d_star", "depth_estimate", "tightest",
                                               "conjectured"};

ojson reports_json(const std::vector<td::BoundReport>& reports) {
    ojson arr = ojson::array();
    for (const auto& r : reports) arr.push_back(td::to_json(r));
    return arr;
}

td::BoundOptions bound_options(const Common& c, bool tight, bool merging_only) {
    td::BoundOptions o;
    o.t = c.t;
    o.eps = c.eps;
    o.tight_log_term = tight;
    o.allow_conjectured = c.allow_conjectured;
    o.count_merging_only = merging_only;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unitary design depth analysis for local random circuit architectures"};
    app.require_subcommand(1);
    Common c;
    std::string arch_path, graph_path;
    std::function<void()> action;

    // analyze
    bool merging_only = false, tight_log = false;
    auto* analyze = app.add_subcommand("analyze", "block decomposition, mean block size and applicable bounds");
    analyze->add_option("arch,--arch", arch_path, "architecture JSON ('-' for stdin)");
    analyze->add_flag("--count-merging-only", merging_only, "count only cluster-merging layers in block sizes");
    analyze->add_flag("--tight-log", tight_log, "use the tight log term in k_*");
    add_common(analyze, c, false);
    analyze->callback([&] {
        action = [&] {
            const auto a = td::parse_architecture(load_json(arch_path, c));
            Output o;
            o.body["architecture"] = arch_summary(a);
            o.body["block_decomposition"] = td::to_json(td::greedy_block_decomposition(a, merging_only));
            const auto reports = td::bound_pipeline(a, bound_options(c, tight_log, merging_only));
            o.body["bounds"] = reports_json(reports);
            o.csv_header = kBoundHeader;
            bound_rows(o, reports, arch_path);
            emit(manifest("analyze", c, {arch_path}, {{"count_merging_only", merging_only ? "true" : "false"}}), o,
                 c);
        };
    });

    // gap
    bool per_block = false;
    auto* gap = app.add_subcommand("gap", "subleading singular value of the period transfer matrix");
    gap->add_option("arch,--arch", arch_path, "architecture JSON ('-' for stdin)");
    gap->add_flag("--layer-bound", per_block, "also bound each connected block through its layer SSVs");
    add_common(gap, c, true);
    gap->callback([&] {
        action = [&] {
            const auto a = td::parse_architecture(load_json(arch_path, c));
            const auto op = td::period_operator(a, c.t, c.dim_guard);
            Output o;
            o.body["architecture"] = arch_summary(a);
            o.body["period_layers"] = static_cast<int>(op.layers.size());
            const auto m = manifest("gap", c, {arch_path}, {{"max_matvecs", std::to_string(c.max_matvecs)}});
            try {
                o.body["report"] = td::to_json(td::subleading_singular_value(op, ssv_options(c)));
            } catch (const td::NonConvergence& e) {
                o.body["report"] = {{"status", "non_converged"},
                                    {"ssv_estimate", e.estimate()},
                                    {"residual", e.residual()},
                                    {"message", e.what()}};
                emit(m, o, c);
                throw;
            }
            if (per_block) {
                ojson blocks = ojson::array();
                const auto d = td::greedy_block_decomposition(a);
                for (const auto& b : d.blocks) {
                    const auto s = td::block_layer_ssvs(a, b.start, b.end, c.t, ssv_options(c));
                    blocks.push_back({{"start", b.start}, {"end", b.end}, {"layer_ssvs", s},
                                      {"bound", td::layer_gap_bound(s)}});
                }
                o.body["blocks"] = blocks;
            }
            o.csv_header = {"ssv", "unit_dim", "method", "dim"};
            const auto& r = o.body["report"];
            o.csv_rows.push_back({num(r["ssv"].get<double>()), std::to_string(r["unit_dim"].get<int>()),
                                  r["method"].get<std::string>(), std::to_string(r["dim"].get<std::size_t>())});
            emit(m, o, c);
        };
    });

    // frame-potential
    int periods = 1;
    long samples = 10000;
    std::string fp_mode = "exact";
    auto* fp = app.add_subcommand("frame-potential", "exact and/or Monte Carlo frame potential");
    fp->add_option("arch,--arch", arch_path, "architecture JSON ('-' for stdin)");
    fp->add_option("--k", periods, "number of periods")->capture_default_str();
    fp->add_option("--mode", fp_mode, "exact|mc|both")->capture_default_str();
    fp->add_option("--samples", samples, "Monte Carlo sample pairs")->capture_default_str();
    add_common(fp, c, true);
    fp->callback([&] {
        action = [&] {
            if (fp_mode != "exact" && fp_mode != "mc" && fp_mode != "both")
                throw td::InvalidInput("--mode must be exact, mc or both");
            const auto a = td::parse_architecture(load_json(arch_path, c));
            Output o;
            o.body["architecture"] = arch_summary(a);
            o.body["k"] = periods;
            o.body["haar_value"] = td::factorial(c.t);
            o.csv_header = {"k", "mode", "value", "std_error"};
            if (fp_mode != "mc") {
                const double f = td::frame_potential_exact(a, periods, c.t, c.dim_guard);
                o.body["exact"] = f;
                o.csv_rows.push_back({std::to_string(periods), "exact", num(f), ""});
            }
            if (fp_mode != "exact") {
                std::mt19937_64 rng(c.seed);
                const auto est = td::frame_potential_mc(a, periods, c.t, samples, rng);
                o.body["monte_carlo"] = td::to_json(est);
                o.csv_rows.push_back({std::to_string(periods), "mc", num(est.estimate), num(est.std_error)});
            }
            emit(manifest("frame-potential", c, {arch_path},
                          {{"k", std::to_string(periods)}, {"mode", fp_mode}, {"samples", std::to_string(samples)}}),
                 o, c);
        };
    });

    // reduce
    bool with_ssv = false;
    auto* reduce = app.add_subcommand("reduce", "Euler-path reduction of a cluster graph to loops");
    reduce->add_option("graph,--graph", graph_path, "cluster graph JSON ('-' for stdin)");
    reduce->add_flag("--ssv", with_ssv, "also report layer-restricted SSVs of input and result");
    add_common(reduce, c, true);
    reduce->callback([&] {
        action = [&] {
            const auto g = td::parse_cluster_graph(load_json(graph_path, c));
            const auto e = td::euler_reduce(g);
            Output o;
            o.body["input"] = td::to_json(g);
            o.body["reduction"] = td::to_json(e);
            o.body["shape"] = td::to_string(td::validate_shape(e.result));
            if (with_ssv) {
                o.body["input_ssv"] = td::to_json(td::layer_restricted_ssv(g, c.t, 2.0, ssv_options(c), c.dim_guard));
                o.body["loop_ssv"] =
                    td::to_json(td::layer_restricted_ssv(e.result, c.t, 2.0, ssv_options(c), c.dim_guard));
            }
            o.csv_header = {"step", "rule", "args"};
            for (std::size_t i = 0; i < e.trace.size(); ++i)
                o.csv_rows.push_back({std::to_string(i), e.trace[i].rule, td::to_json(e.trace[i])["args"].dump()});
            emit(manifest("reduce", c, {graph_path}, {}), o, c);
        };
    });

    // decompose
    std::string scheme = "both";
    auto* decompose = app.add_subcommand("decompose", "tree and log-log layer decompositions of a cluster graph");
    decompose->add_option("graph,--graph", graph_path, "cluster graph JSON ('-' for stdin)");
    decompose->add_option("--scheme", scheme, "tree|loglog|both")->capture_default_str();
    add_common(decompose, c, false);
    decompose->callback([&] {
        action = [&] {
            if (scheme != "tree" && scheme != "loglog" && scheme != "both")
                throw td::InvalidInput("--scheme must be tree, loglog or both");
            const auto g = td::parse_cluster_graph(load_json(graph_path, c));
            Output o;
            o.csv_header = {"scheme", "layers", "ceiling", "brickwork_compatible", "contraction_consistent"};
            auto run = [&](const td::LayerDecomposition& d) {
                auto j = td::to_json(d);
                j["contraction_consistent"] = td::contraction_consistent(d);
                o.body[d.method] = j;
                o.csv_rows.push_back({d.method, std::to_string(d.layer_count()), std::to_string(d.ceiling),
                                      d.all_brickwork_compatible() ? "1" : "0",
                                      td::contraction_consistent(d) ? "1" : "0"});
            };
            if (scheme != "loglog") run(td::tree_decompose(g));
            if (scheme != "tree") run(td::loglog_decompose(g));
            emit(manifest("decompose", c, {graph_path}, {{"scheme", scheme}}), o, c);
        };
    });

    // bound
    std::optional<int> bn;
    std::optional<double> bq, bs, bell;
    bool conj_count = false;
    auto* bound = app.add_subcommand("bound", "design-depth bounds for an architecture or raw parameters");
    bound->add_option("arch,--arch", arch_path, "architecture JSON ('-' for stdin)");
    bound->add_option("--N", bn, "number of sites (formula mode)");
    bound->add_option("--q", bq, "local dimension (formula mode)");
    bound->add_option("--s-star", bs, "use this s_* directly (formula mode)");
    bound->add_option("--ell", bell, "period length; s_* from the tightest C (formula mode)");
    bound->add_flag("--conjectured-count", conj_count, "also report the conjectured block count");
    bound->add_flag("--tight-log", tight_log, "use the tight log term in k_*");
    bound->add_flag("--count-merging-only", merging_only, "count only cluster-merging layers in block sizes");
    add_common(bound, c, false);
    bound->callback([&] {
        action = [&] {
            Output o;
            o.csv_header = kBoundHeader;
            std::vector<std::string> inputs;
            if (bn || bq) {
                if (!bn || !bq) throw td::InvalidInput("formula mode needs both --N and --q");
                ojson f;
                f["N"] = *bn;
                f["q"] = *bq;
                double s = 0.0;
                if (bs) {
                    s = *bs;
                } else if (bell) {
                    const auto cv = td::tightest_c(*bq, c.t, c.allow_conjectured);
                    if (!cv) throw td::InvalidInput("no admissible C for these parameters");
                    s = td::s_star_periodic(cv->value, *bell);
                    f["c_used"] = td::to_json(*cv);
                }
                if (bs || bell) {
                    f["s_star"] = s;
                    f["k_star"] = td::k_star(*bn, *bq, c.t, c.eps, s, tight_log);
                    f["k_star_ceil"] = static_cast<long>(std::ceil(f["k_star"].get<double>() - 1e-12));
                    if (bell) f["d_star"] = static_cast<long>(*bell) * f["k_star_ceil"].get<long>();
                }
                if (conj_count) f["conjectured_block_count"] = td::conjectured_block_count(*bn, *bq, c.t, c.eps);
                f["x_expansion"] = td::x_expansion(*bn);
                o.body["formula"] = f;
            } else {
                const auto a = td::parse_architecture(load_json(arch_path, c));
                inputs.push_back(arch_path);
                const auto reports = td::bound_pipeline(a, bound_options(c, tight_log, merging_only));
                o.body["reports"] = reports_json(reports);
                for (const auto& r : reports)
                    if (r.tightest) {
                        o.body["k_star"] = r.k_star;
                        o.body["d_star"] = r.d_star ? ojson(*r.d_star) : ojson(nullptr);
                        o.body["tightest_path"] = td::to_string(r.path);
                    }
                if (conj_count)
                    o.body["conjectured_block_count"] = td::conjectured_block_count(a.num_sites, a.local_dim, c.t, c.eps);
                bound_rows(o, reports, arch_path);
            }
            emit(manifest("bound", c, inputs, {{"tight_log", tight_log ? "true" : "false"}}), o, c);
        };
    });

    // sweep
    std::string family = "brickwork1d", bc = "periodic";
    int n_min = 4, n_max = 16, n_step = 2;
    double sq = 2.0;
    auto* sweep = app.add_subcommand("sweep", "bounds over a range of system sizes");
    sweep->add_option("--family", family, "brickwork1d")->capture_default_str();
    sweep->add_option("--bc", bc, "periodic|open")->capture_default_str();
    sweep->add_option("--n-min", n_min)->capture_default_str();
    sweep->add_option("--n-max", n_max)->capture_default_str();
    sweep->add_option("--n-step", n_step)->capture_default_str();
    sweep->add_option("--q", sq, "local dimension")->capture_default_str();
    sweep->add_flag("--tight-log", tight_log, "use the tight log term in k_*");
    add_common(sweep, c, false);
    sweep->callback([&] {
        action = [&] {
            if (family != "brickwork1d") throw td::InvalidInput("unknown --family '" + family + "'");
            if (bc != "periodic" && bc != "open") throw td::InvalidInput("--bc must be periodic or open");
            if (n_step < 1 || n_min < 2 || n_max < n_min) throw td::InvalidInput("bad N range");
            Output o;
            o.csv_header = kBoundHeader;
            ojson rows = ojson::array();
            for (int n = n_min; n <= n_max; n += n_step) {
                const auto a = td::brickwork_1d(n, bc == "open" ? td::Boundary::open : td::Boundary::periodic, sq);
                const auto reports = td::bound_pipeline(a, bound_options(c, tight_log, false));
                rows.push_back({{"N", n}, {"reports", reports_json(reports)}});
                bound_rows(o, reports, "N=" + std::to_string(n));
            }
            o.body["sweep"] = rows;
            emit(manifest("sweep", c, {},
                          {{"family", family}, {"bc", bc}, {"q", num(sq)}, {"n_min", std::to_string(n_min)},
                           {"n_max", std::to_string(n_max)}, {"n_step", std::to_string(n_step)}}),
                 o, c);
        };
    });

    // anneal
    int an = 6, alayers = 0;
    double aq = 2.0;
    td::AnnealConfig acfg;
    std::optional<double> acool, atemp;
    std::string policy = "reject";
    bool with_trace = true;
    auto* anneal = app.add_subcommand("anneal", "simulated annealing towards maximal subleading singular value");
    anneal->add_option("--n", an, "number of sites")->capture_default_str();
    anneal->add_option("--q", aq, "local dimension")->capture_default_str();
    anneal->add_option("--layers", alayers, "number of layers (default N)");
    anneal->add_option("--iterations", acfg.iterations)->capture_default_str();
    anneal->add_option("--move-mean", acfg.move_mean, "mean number of moves per proposal")->capture_default_str();
    anneal->add_option("--cooling", acool, "multiplicative cooling factor (default reaches 1e-3)");
    anneal->add_option("--t-start", atemp, "starting temperature (default automatic)");
    anneal->add_option("--policy", policy, "reject|penalize for disconnected proposals")->capture_default_str();
    anneal->add_flag("!--no-trace", with_trace, "omit the per-iteration trace from JSON");
    add_common(anneal, c, true);
    anneal->callback([&] {
        action = [&] {
            if (policy != "reject" && policy != "penalize") throw td::InvalidInput("--policy must be reject or penalize");
            acfg.policy = policy == "reject" ? td::ConnectivityPolicy::reject : td::ConnectivityPolicy::penalize;
            acfg.cooling = acool;
            acfg.t_start = atemp;
            acfg.seed = c.seed;
            acfg.dim_guard = std::min(c.dim_guard, td::kDenseLimit);
            const int layers = alayers > 0 ? alayers : an;
            const auto r = td::anneal_max_ssv(an, aq, c.t, layers, acfg);
            Output o;
            o.body["config"] = td::to_json(acfg);
            o.body["result"] = td::to_json(r, with_trace);
            o.csv_header = {"iteration", "beta", "ssv", "accepted"};
            for (const auto& s : r.trace)
                o.csv_rows.push_back({std::to_string(s.iteration), num(s.beta), num(s.ssv), s.accepted ? "1" : "0"});
            emit(manifest("anneal", c, {},
                          {{"N", std::to_string(an)}, {"q", num(aq)}, {"layers", std::to_string(layers)},
                           {"iterations", std::to_string(acfg.iterations)}, {"policy", policy}}),
                 o, c);
        };
    });

    // ensemble
    std::string graph_kind = "path";
    int en = 16, trials = 2000;
    std::optional<int> fixed_gates;
    bool averaged = false;
    auto* ensemble = app.add_subcommand("ensemble", "connection statistics of random gate sequences");
    ensemble->add_option("--graph", graph_kind, "path|complete")->capture_default_str();
    ensemble->add_option("--n", en, "number of sites")->capture_default_str();
    ensemble->add_option("--trials", trials)->capture_default_str();
    ensemble->add_option("--fixed-gates", fixed_gates, "also sample sequences of exactly this many gates");
    ensemble->add_flag("--averaged", averaged, "ensemble-averaged bound at --fixed-gates (conjectured path too)");
    add_common(ensemble, c, false);
    ensemble->callback([&] {
        action = [&] {
            if (graph_kind != "path" && graph_kind != "complete")
                throw td::InvalidInput("--graph must be path or complete");
            const auto g = graph_kind == "path" ? td::InteractionGraph::path(en) : td::InteractionGraph::complete(en);
            std::mt19937_64 rng(c.seed);
            const auto st = td::ensemble_connection_stats(g, trials, rng, fixed_gates);
            Output o;
            o.body["stats"] = td::to_json(st);
            if (averaged) {
                if (!fixed_gates) throw td::InvalidInput("--averaged needs --fixed-gates");
                const int ng = *fixed_gates;
                std::function<td::Architecture(std::mt19937_64&)> sampler = [&](std::mt19937_64& r) {
                    return td::sample_gate_sequence(g, ng, r);
                };
                o.body["averaged_bound"] =
                    td::to_json(td::averaged_bound_check(sampler, c.t, c.eps, trials, rng, true, c.allow_conjectured));
            }
            o.csv_header = {"trial", "gates_to_connect"};
            for (std::size_t i = 0; i < st.gates_to_connect.size(); ++i)
                o.csv_rows.push_back({std::to_string(i), std::to_string(st.gates_to_connect[i])});
            emit(manifest("ensemble", c, {},
                          {{"graph", graph_kind}, {"N", std::to_string(en)}, {"trials", std::to_string(trials)},
                           {"fixed_gates", fixed_gates ? std::to_string(*fixed_gates) : "none"}}),
                 o, c);
        };
    });

    // generate
    std::string gen_kind;
    int gn = 4, gperiods = 1, gside = 4, gdims = 2, glayers = 4;
    double gq = 2.0;
    bool gcomplete = false;
    auto* generate = app.add_subcommand("generate", "emit an architecture JSON");
    generate->add_option("kind", gen_kind, "brickwork1d|brickwork-ddim|random")->required();
    generate->add_option("--n", gn, "number of sites")->capture_default_str();
    generate->add_option("--bc", bc, "periodic|open")->capture_default_str();
    generate->add_option("--q", gq, "local dimension")->capture_default_str();
    generate->add_option("--periods", gperiods, "repeat the period this many times")->capture_default_str();
    generate->add_option("--L", gside, "side length (brickwork-ddim)")->capture_default_str();
    generate->add_option("--D", gdims, "dimension (brickwork-ddim)")->capture_default_str();
    generate->add_option("--layers", glayers, "layer count (random)")->capture_default_str();
    generate->add_flag("--complete", gcomplete, "random layers are perfect matchings");
    add_common(generate, c, false);
    generate->callback([&] {
        action = [&] {
            td::Architecture a;
            if (gen_kind == "brickwork1d") {
                if (bc != "periodic" && bc != "open") throw td::InvalidInput("--bc must be periodic or open");
                a = td::brickwork_1d(gn, bc == "open" ? td::Boundary::open : td::Boundary::periodic, gq);
            } else if (gen_kind == "brickwork-ddim") {
                a = td::brickwork_ddim(gside, gdims, gq);
            } else if (gen_kind == "random") {
                std::mt19937_64 rng(c.seed);
                a = td::random_connected(gn, glayers, rng, gq, gcomplete);
            } else {
                throw td::InvalidInput("unknown architecture kind '" + gen_kind + "'");
            }
            if (gperiods > 1) a = td::repeat_periods(a, gperiods);
            const std::string text = td::to_json(a).dump(2) + "\n";
            if (!c.out.empty() && !c.stdio)
                td::write_atomic(c.out, text);
            else
                std::cout << text;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        action();
    } catch (const td::DimensionGuardExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const td::NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const td::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
