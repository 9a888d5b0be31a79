// mecchain: enumerate catalogs, run chains, estimate, verify, size table.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mecchain/mecchain.hpp"

using namespace mecchain;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;
constexpr long kProgressEvery = 10000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int full_budget(int p) { return p * (p - 1) / 2; }

/// Chain flags shared by chain and table1. Unset flags leave the config
/// file (or the defaults) in place.
struct ChainFlags {
    std::string config_path;
    int p = 0;
    int n_max = 0;
    long steps = 0;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    std::string start_path;
    long burn_in = 0;
    long thin = 1;
    int max_resamples = 1000;

    std::map<std::string, CLI::Option*> opts;

    void add(CLI::App& app, bool with_start = true) {
        opts["config"] = app.add_option("--config", config_path, "JSON config or manifest; flags override it");
        opts["p"] = app.add_option("--p", p, "number of vertices");
        opts["max-edges"] = app.add_option("--max-edges", n_max, "edge budget (default p(p-1)/2)");
        opts["steps"] = app.add_option("--steps", steps, "number of transitions");
        opts["alpha"] = app.add_option("--alpha", alpha, "fraction of candidates checked per step");
        opts["seed"] = app.add_option("--seed", seed, "RNG seed");
        if (with_start) opts["start"] = app.add_option("--start", start_path, "start state (graph JSON)");
        opts["burn-in"] = app.add_option("--burn-in", burn_in, "steps skipped by estimators");
        opts["thin"] = app.add_option("--thin", thin, "estimators keep every k-th step");
        opts["max-resamples"] =
            app.add_option("--max-resamples", max_resamples, "empty subsamples before exact fallback");
    }

    bool given(const std::string& name) const {
        auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }

    ChainConfig resolve() const {
        ChainConfig c;
        bool budget_from_file = false;
        if (!config_path.empty()) {
            json j = read_json_file(config_path);
            if (j.contains("format") && j.value("format", "") == "mecchain-manifest") j = j.at("config");
            budget_from_file = j.contains("max_edges");
            c = config_from_json(j, c);
        }
        if (given("p")) c.p = p;
        if (given("max-edges")) c.n_max = n_max;
        else if (!budget_from_file) c.n_max = full_budget(c.p);
        if (given("steps")) c.steps = steps;
        if (given("alpha")) c.alpha = alpha;
        if (given("seed")) c.seed = seed;
        if (given("start")) c.start = cpdag_from_json(read_json_file(start_path));
        if (given("burn-in")) c.burn_in = burn_in;
        if (given("thin")) c.thin = thin;
        if (given("max-resamples")) c.max_resamples = max_resamples;
        validate(c);
        return c;
    }
};

std::string manifest_path_for(const std::string& out) { return out + ".manifest.json"; }

void write_manifest(const RunManifest& m, const std::string& path) {
    write_text_file(path, m.to_json().dump(2) + "\n");
}

ChainConfig with_seed(ChainConfig c, int chain_index) {
    c.seed += static_cast<std::uint64_t>(chain_index);
    return c;
}

/// Prefix estimate of the expected directed-edge proportion, reported on
/// stderr every kProgressEvery steps.
class Progress {
public:
    Progress(bool enabled, std::string label) : on_(enabled), label_(std::move(label)), t0_(Clock::now()) {}
    void operator()(const ChainStep& s) {
        if (!on_) return;
        const double w = 1.0 / s.m_count;
        den_ += w;
        num_ += w * feature(s.state, FeatureKind::DirectedEdgeProportion);
        if (s.t > 0 && s.t % kProgressEvery == 0) {
            const double el = seconds_since(t0_);
            std::fprintf(stderr, "%s t=%ld elapsed=%.1fs kappa=%.5fs directed_edge_proportion~%.4f\n",
                         label_.c_str(), s.t, el, el / static_cast<double>(s.t), num_ / den_);
        }
    }

private:
    bool on_;
    std::string label_;
    Clock::time_point t0_;
    double num_ = 0.0, den_ = 0.0;
};

// ---------------------------------------------------------------------------

int cmd_enumerate(int p, std::optional<int> n_max_opt, bool allow_p6, const std::string& out) {
    const int n_max = n_max_opt.value_or(full_budget(p));
    if (p < 1) throw ConfigError("p must be at least 1");
    if (n_max < 0) throw ConfigError("max edges must be nonnegative");
    const auto t0 = Clock::now();
    const auto cat = enumerate_mecs(p, n_max, {}, allow_p6);
    const double el = seconds_since(t0);
    std::uint64_t dags = 0;
    for (auto s : cat.sizes) dags += s;
    std::cout << "p=" << p << " max_edges=" << n_max << " states=" << cat.size() << " dags=" << dags
              << " seconds=" << format_number(el) << "\n";
    for (const auto& [size, count] : size_histogram(cat))
        std::cout << "  size " << size << ": " << count << " classes\n";
    if (!out.empty()) {
        write_text_file(out, to_json(cat).dump(1) + "\n");
        RunManifest m;
        m.subcommand = "enumerate";
        m.config = {{"p", p}, {"max_edges", n_max}, {"allow_p6", allow_p6}};
        m.outputs = {out};
        m.wall_seconds = el;
        write_manifest(m, manifest_path_for(out));
    }
    return 0;
}

int cmd_chain(const ChainFlags& flags, const std::string& out, long trace_thin, bool thin_given, int chains,
              bool chains_given, bool quiet) {
    const ChainConfig cfg = flags.resolve();
    if (!flags.config_path.empty()) {
        const json j = read_json_file(flags.config_path);
        const json& c = j.contains("config") ? j.at("config") : j;
        if (!thin_given && c.contains("trace_thin")) trace_thin = c.at("trace_thin").get<long>();
        if (!chains_given && c.contains("chains")) chains = c.at("chains").get<int>();
    }
    if (out.empty()) throw ConfigError("chain needs --out");
    if (chains < 1) throw ConfigError("--chains must be positive");
    std::vector<std::string> paths;
    for (int i = 0; i < chains; ++i) paths.push_back(chains == 1 ? out : out + "." + std::to_string(i));

    const auto t0 = Clock::now();
    auto run_one = [&](int i) {
        const ChainConfig c = with_seed(cfg, i);
        std::ofstream f(paths[i], std::ios::binary);
        if (!f) throw FormatError("cannot write " + paths[i]);
        TraceWriter w(f, c, trace_thin);
        Progress prog(!quiet && c.steps >= kProgressEvery, "chain " + std::to_string(i));
        simulate(c, [&](const ChainStep& s) {
            w(s);
            prog(s);
        });
    };
    if (chains == 1) {
        run_one(0);
    } else {
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(chains);
        for (int i = 0; i < chains; ++i)
            threads.emplace_back([&, i] {
                try {
                    run_one(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
        for (auto& t : threads) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    const double el = seconds_since(t0);

    RunManifest m;
    m.subcommand = "chain";
    m.config = to_json(cfg);
    m.config["trace_thin"] = trace_thin;
    m.config["chains"] = chains;
    if (!flags.start_path.empty()) m.inputs = {flags.start_path};
    m.outputs = paths;
    m.seed = cfg.seed;
    m.wall_seconds = el;
    m.steps = cfg.steps * chains;
    write_manifest(m, manifest_path_for(out));
    std::cout << "wrote " << paths.size() << " trace(s); steps=" << cfg.steps << " kappa_seconds="
              << format_number(m.kappa()) << "\n";
    return 0;
}

int cmd_estimate(const std::vector<std::string>& traces, const std::vector<std::string>& feature_names,
                 const std::string& out, const std::string& summary, double resolution,
                 bool include_singletons, double empty_proportion, std::optional<long> burn_in,
                 std::optional<long> thin) {
    std::vector<FeatureKind> kinds;
    for (const auto& n : feature_names) {
        if (n == "all") {
            kinds = all_features();
            break;
        }
        kinds.push_back(feature_from_name(n));
    }
    if (kinds.empty()) kinds = {FeatureKind::MecSize};
    if (!(resolution > 0.0)) throw ConfigError("--resolution must be positive");
    AggregateOptions opt;
    opt.resolution = resolution;
    opt.feature.include_singleton_components = include_singletons;
    opt.feature.empty_graph_proportion = empty_proportion;

    std::optional<TraceAggregator> total;
    const auto t0 = Clock::now();
    long steps = 0;
    for (const auto& path : traces) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw FormatError("cannot open " + path);
        // The header is parsed first so burn-in/thin overrides apply before aggregation.
        std::string header;
        std::getline(in, header);
        ChainConfig cfg = trace_header_from_json(json::parse(header)).config;
        if (burn_in) cfg.burn_in = *burn_in;
        if (thin) cfg.thin = *thin;
        validate(cfg);
        in.clear();
        in.seekg(0);
        TraceAggregator agg(cfg, kinds, opt);
        read_trace(in, [&](const ChainStep& s) {
            agg.add(s);
            ++steps;
        });
        if (total) total->merge(agg);
        else total.emplace(std::move(agg));
    }
    std::vector<const WeightedHistogram*> hists;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (total->histogram(i).empty()) throw ConfigError("burn-in and thinning leave no steps");
        hists.push_back(&total->histogram(i));
    }
    std::ostringstream csv, sum;
    write_histogram_csv(csv, kinds, hists);
    write_summary_csv(sum, kinds, hists);
    if (out.empty()) std::cout << csv.str();
    else write_text_file(out, csv.str());
    if (!summary.empty()) write_text_file(summary, sum.str());
    else if (!out.empty()) std::cout << sum.str();

    if (!out.empty()) {
        RunManifest m;
        m.subcommand = "estimate";
        json feats = json::array();
        for (auto k : kinds) feats.push_back(feature_name(k));
        m.config = {{"features", feats},
                    {"resolution", resolution},
                    {"include_singleton_components", include_singletons},
                    {"empty_graph_proportion", empty_proportion},
                    {"burn_in", burn_in ? json(*burn_in) : json(nullptr)},
                    {"thin", thin ? json(*thin) : json(nullptr)}};
        m.inputs = traces;
        m.outputs = {out};
        if (!summary.empty()) m.outputs.push_back(summary);
        m.wall_seconds = seconds_since(t0);
        m.steps = steps;
        write_manifest(m, manifest_path_for(out));
    }
    return 0;
}

void print_perfectness(const PerfectnessReport& r) {
    auto flag = [](bool b) { return b ? "PASS" : "FAIL"; };
    std::cout << "  validity:           " << flag(r.validity) << "\n"
              << "  distinguishability: " << flag(r.distinguishability) << "\n"
              << "  reversibility:      " << flag(r.reversibility) << "\n"
              << "  irreducibility:     " << flag(r.irreducibility) << "\n";
    for (const auto& w : r.counterexamples) std::cout << "  witness: " << w << "\n";
}

int cmd_verify(std::optional<int> p, std::optional<int> n_max_opt, bool all_budgets,
               const std::string& catalog_path, const std::vector<std::string>& disabled) {
    bool ok = true;
    if (!catalog_path.empty()) {
        const auto file = catalog_file_from_json(read_json_file(catalog_path));
        const auto check = check_catalog_file(file);
        std::cout << "catalog " << catalog_path << " (p=" << file.p << ", max_edges=" << file.n_max
                  << ", " << file.states.size() << " states)\n";
        print_perfectness(check.perfect);
        for (const auto& w : check.problems) std::cout << "  witness: " << w << "\n";
        ok = check.passed();
        std::cout << (ok ? "PASS" : "FAIL") << "\n";
        return ok ? 0 : kExitVerify;
    }
    if (!p) throw ConfigError("verify needs --p or --catalog");
    if (*p < 2) throw ConfigError("p must be at least 2");
    ConditionToggles toggles;
    for (const auto& d : disabled) {
        if (d == "iu3") toggles.iu3 = false;
        else if (d == "id3") toggles.id3 = false;
        else if (d == "dd2") toggles.dd2 = false;
        else throw ConfigError("unknown condition '" + d + "' (iu3, id3, dd2)");
    }
    std::vector<int> budgets;
    if (all_budgets)
        for (int n = 1; n <= full_budget(*p); ++n) budgets.push_back(n);
    else
        budgets.push_back(n_max_opt.value_or(full_budget(*p)));
    for (int n : budgets) {
        if (n < 1) throw ConfigError("max edges must be at least 1");
        const auto cat = enumerate_mecs(*p, n, toggles);
        const auto perfect = verify_perfect(cat);
        const auto balance = verify_detailed_balance(cat);
        std::cout << "p=" << *p << " max_edges=" << n << " states=" << cat.size() << "\n";
        print_perfectness(perfect);
        std::cout << "  detailed balance:   " << (balance.detailed_balance ? "PASS" : "FAIL") << "\n"
                  << "  global balance:     " << (balance.global_balance ? "PASS" : "FAIL")
                  << " (max residual " << balance.max_global_residual << ")\n";
        for (const auto& w : balance.counterexamples) std::cout << "  witness: " << w << "\n";
        ok = ok && perfect.passed() && balance.passed();
    }
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : kExitVerify;
}

int cmd_table1(const ChainFlags& flags, int chains, bool estimate_only, const std::string& out, bool quiet) {
    ChainConfig cfg = flags.resolve();
    if (!flags.given("steps") && flags.config_path.empty()) cfg.steps = 10000;
    if (chains < 1) throw ConfigError("--chains must be positive");

    std::map<double, double> exact;
    if (!estimate_only) {
        if (cfg.p > kDefaultMaxEnumerationP)
            throw ConfigError("exact sizes need p <= " + std::to_string(kDefaultMaxEnumerationP) +
                              "; use --estimate-only");
        const auto cat = enumerate_mecs(cfg.p, cfg.n_max);
        exact = true_distribution(cat, [](const CompletedPdag& c) { return static_cast<double>(mec_size(c)); });
    }

    const auto t0 = Clock::now();
    std::vector<std::optional<WeightedHistogram>> per_chain(chains);
    std::vector<std::exception_ptr> errors(chains);
    auto run_one = [&](int i) {
        try {
            const ChainConfig c = with_seed(cfg, i);
            TraceAggregator agg(c, {FeatureKind::MecSize});
            Progress prog(!quiet && c.steps >= kProgressEvery, "chain " + std::to_string(i));
            simulate(c, [&](const ChainStep& s) {
                agg.add(s);
                prog(s);
            });
            per_chain[i] = agg.histogram(0);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (chains == 1) {
        run_one(0);
    } else {
        std::vector<std::thread> threads;
        for (int i = 0; i < chains; ++i) threads.emplace_back(run_one, i);
        for (auto& t : threads) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    const double el = seconds_since(t0);

    WeightedHistogram merged;
    for (const auto& h : per_chain) merged.merge(*h);
    std::map<double, bool> rows;
    for (const auto& [v, _] : exact) rows[v] = true;
    for (const auto& [v, _] : merged.bins()) rows[v] = true;

    std::ostringstream csv;
    csv << "size,true_value,estimate,std_across_chains\n";
    std::printf("p=%d max_edges=%d steps=%ld alpha=%g chains=%d\n", cfg.p, cfg.n_max, cfg.steps, cfg.alpha,
                chains);
    std::printf("%8s %12s %12s %12s\n", "size", "true", "estimate", "std");
    for (const auto& [v, _] : rows) {
        const double est = merged.probability(v);
        double sd = std::nan("");
        if (chains > 1) {
            double s1 = 0, s2 = 0;
            for (const auto& h : per_chain) {
                const double x = h->probability(v);
                s1 += x;
                s2 += x * x;
            }
            const double mean = s1 / chains;
            sd = std::sqrt(std::max(0.0, (s2 - chains * mean * mean) / (chains - 1)));
        }
        const bool has_exact = exact.count(v) > 0;
        char ex_buf[32] = "-", sd_buf[32] = "-";
        if (has_exact) std::snprintf(ex_buf, sizeof ex_buf, "%.5f", exact[v]);
        if (chains > 1) std::snprintf(sd_buf, sizeof sd_buf, "%.5f", sd);
        std::printf("%8g %12s %12.5f %12s\n", v, ex_buf, est, sd_buf);
        csv << format_number(v) << ',' << (has_exact ? format_number(exact[v]) : "") << ','
            << format_number(est) << ',' << (chains > 1 ? format_number(sd) : "") << '\n';
    }
    if (!out.empty()) {
        write_text_file(out, csv.str());
        RunManifest m;
        m.subcommand = "table1";
        m.config = to_json(cfg);
        m.config["chains"] = chains;
        m.config["estimate_only"] = estimate_only;
        m.outputs = {out};
        m.seed = cfg.seed;
        m.wall_seconds = el;
        m.steps = cfg.steps * chains;
        write_manifest(m, manifest_path_for(out));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markov chain over Markov equivalence classes of sparse DAGs"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "no progress output");

    auto* en = app.add_subcommand("enumerate", "list every class on p vertices");
    int en_p = 0;
    std::optional<int> en_n;
    bool en_p6 = false;
    std::string en_out;
    en->add_option("--p", en_p, "number of vertices")->required();
    en->add_option("--max-edges", en_n, "edge budget (default p(p-1)/2)");
    en->add_flag("--allow-p6", en_p6, "permit the slow p=6 enumeration");
    en->add_option("--out", en_out, "catalog JSON");

    auto* ch = app.add_subcommand("chain", "run a chain and write its trace");
    ChainFlags ch_flags;
    std::string ch_out;
    long ch_trace_thin = 1;
    int ch_chains = 1;
    ch_flags.add(*ch);
    ch->add_option("--out", ch_out, "trace file (JSON lines)")->required();
    auto* ch_thin_opt =
        ch->add_option("--trace-thin", ch_trace_thin, "write the full state every k-th step, hashes otherwise");
    auto* ch_chains_opt = ch->add_option("--chains", ch_chains, "independent chains with seeds seed, seed+1, ...");

    auto* es = app.add_subcommand("estimate", "weighted feature distributions from traces");
    std::vector<std::string> es_traces, es_features;
    std::string es_out, es_summary;
    double es_res = 0.01, es_empty = 0.0;
    bool es_single = false;
    std::optional<long> es_burn, es_thin;
    es->add_option("traces", es_traces, "trace files")->required();
    es->add_option("--feature", es_features, "feature name(s) or 'all'");
    es->add_option("--out", es_out, "CSV feature,bin,probability");
    es->add_option("--summary", es_summary, "quantile summary CSV");
    es->add_option("--resolution", es_res, "bin width for proportions");
    es->add_flag("--include-singleton-components", es_single, "count isolated vertices as components");
    es->add_option("--empty-proportion", es_empty, "directed-edge proportion of the empty graph");
    es->add_option("--burn-in", es_burn, "override the trace's burn-in");
    es->add_option("--thin", es_thin, "override the trace's thinning");

    auto* ve = app.add_subcommand("verify", "machine-check perfectness and detailed balance");
    std::optional<int> ve_p, ve_n;
    bool ve_all = false;
    std::string ve_catalog;
    std::vector<std::string> ve_disable;
    ve->add_option("--p", ve_p, "number of vertices");
    ve->add_option("--max-edges", ve_n, "edge budget (default p(p-1)/2)");
    ve->add_flag("--all-budgets", ve_all, "check every budget 1..p(p-1)/2");
    ve->add_option("--catalog", ve_catalog, "verify a catalog file instead");
    ve->add_option("--disable-condition", ve_disable, "drop iu3, id3 or dd2 (negative control)");

    auto* tb = app.add_subcommand("table1", "exact and estimated class-size distribution");
    ChainFlags tb_flags;
    int tb_chains = 1;
    bool tb_est = false;
    std::string tb_out;
    tb_flags.add(*tb, false);
    tb->add_option("--chains", tb_chains, "independent chains merged into one estimate");
    tb->add_flag("--estimate-only", tb_est, "skip exact enumeration (p > 5)");
    tb->add_option("--out", tb_out, "CSV output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*en) return cmd_enumerate(en_p, en_n, en_p6, en_out);
        if (*ch) return cmd_chain(ch_flags, ch_out, ch_trace_thin, ch_thin_opt->count() > 0, ch_chains,
                                  ch_chains_opt->count() > 0, quiet);
        if (*es)
            return cmd_estimate(es_traces, es_features, es_out, es_summary, es_res, es_single, es_empty, es_burn,
                                es_thin);
        if (*ve) return cmd_verify(ve_p, ve_n, ve_all, ve_catalog, ve_disable);
        if (*tb) return cmd_table1(tb_flags, tb_chains, tb_est, tb_out, quiet);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const LimitExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
