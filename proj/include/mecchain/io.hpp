#pragma once

// JSON formats for graphs, operators, catalogs, chain traces and run
// manifests, plus the estimator CSVs.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mecchain/stats.hpp"

namespace mecchain {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr const char* kRoundingRule = "round-half-away-from-zero, minimum 1";

using json = nlohmann::json;

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Graphs

inline json to_json(const Pdag& g) {
    json edges = json::array();
    for (const auto& e : g.edges())
        edges.push_back({e.from, e.kind == EdgeKind::Directed ? "->" : "--", e.to});
    return {{"p", g.num_vertices()}, {"edges", std::move(edges)}};
}

inline json to_json(const CompletedPdag& c) { return to_json(c.graph()); }

namespace detail {
inline int vertex_from_json(const json& v) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        std::size_t used = 0;
        int out = 0;
        try {
            out = std::stoi(s, &used);
        } catch (const std::exception&) {
            throw FormatError("vertex id '" + s + "' is not an integer");
        }
        if (used != s.size()) throw FormatError("vertex id '" + s + "' is not an integer");
        return out;
    }
    throw FormatError("vertex id must be an integer");
}
} // namespace detail

/// Accepts integer ids or their decimal strings; any edge order.
inline Pdag pdag_from_json(const json& j) {
    if (!j.is_object() || !j.contains("p") || !j.contains("edges"))
        throw FormatError("graph JSON needs \"p\" and \"edges\"");
    const int p = j.at("p").get<int>();
    if (p < 0) throw FormatError("negative vertex count");
    Pdag g(p);
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3) throw FormatError("edge must be [u, \"->\"|\"--\", v]");
        const int u = detail::vertex_from_json(e[0]);
        const int v = detail::vertex_from_json(e[2]);
        const auto mark = e[1].get<std::string>();
        try {
            if (mark == "->")
                g.add_directed(u, v);
            else if (mark == "--")
                g.add_undirected(u, v);
            else
                throw FormatError("unknown edge mark '" + mark + "'");
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception& ex) {
            throw FormatError(ex.what());
        }
    }
    return g;
}

inline CompletedPdag cpdag_from_json(const json& j) {
    auto r = validate_cpdag(pdag_from_json(j));
    if (!r)
        throw FormatError("not a completed PDAG (condition " + std::to_string(r.error().condition) +
                          "): " + r.error().witness);
    return r.value();
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& ex) {
        throw FormatError(path + ": " + ex.what());
    }
}

/// FNV-1a over the canonical compact graph JSON.
inline std::uint64_t state_hash(const CompletedPdag& c) {
    const std::string s = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// ---------------------------------------------------------------------------
// Operators

inline json to_json(const Operator& op) {
    json j{{"kind", kind_name(op.kind)}, {"x", op.x}, {"y", op.y}};
    if (op.z >= 0) j["z"] = op.z;
    return j;
}

inline Operator operator_from_json(const json& j) {
    Operator op;
    op.kind = kind_from_name(j.at("kind").get<std::string>());
    op.x = j.at("x").get<int>();
    op.y = j.at("y").get<int>();
    op.z = j.contains("z") ? j.at("z").get<int>() : -1;
    return op;
}

// ---------------------------------------------------------------------------
// Chain config

inline json to_json(const ChainConfig& c) {
    return {{"p", c.p},
            {"max_edges", c.n_max},
            {"steps", c.steps},
            {"alpha", c.alpha},
            {"seed", c.seed},
            {"start", c.start ? to_json(*c.start) : json(nullptr)},
            {"max_resamples", c.max_resamples},
            {"burn_in", c.burn_in},
            {"thin", c.thin}};
}

/// Missing keys keep the values already in `base`.
inline ChainConfig config_from_json(const json& j, ChainConfig base = {}) {
    if (!j.is_object()) throw FormatError("config must be a JSON object");
    try {
        if (j.contains("p")) base.p = j.at("p").get<int>();
        if (j.contains("max_edges")) base.n_max = j.at("max_edges").get<int>();
        if (j.contains("steps")) base.steps = j.at("steps").get<long>();
        if (j.contains("alpha")) base.alpha = j.at("alpha").get<double>();
        if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("start") && !j.at("start").is_null()) base.start = cpdag_from_json(j.at("start"));
        if (j.contains("max_resamples")) base.max_resamples = j.at("max_resamples").get<int>();
        if (j.contains("burn_in")) base.burn_in = j.at("burn_in").get<long>();
        if (j.contains("thin")) base.thin = j.at("thin").get<long>();
    } catch (const json::exception& ex) {
        throw FormatError(std::string("config: ") + ex.what());
    }
    return base;
}

// ---------------------------------------------------------------------------
// Catalogs

inline constexpr int kCatalogVersion = 1;

inline json to_json(const StateSpaceCatalog& cat) {
    json states = json::array();
    for (std::size_t i = 0; i < cat.size(); ++i)
        states.push_back({{"graph", to_json(cat.states[i])},
                          {"size", cat.sizes[i]},
                          {"operators", cat.operator_sets[i].size()}});
    return {{"format", "mecchain-catalog"},
            {"version", kCatalogVersion},
            {"p", cat.p},
            {"max_edges", cat.n_max},
            {"states", std::move(states)}};
}

struct CatalogFile {
    int p = 0;
    int n_max = 0;
    std::vector<CompletedPdag> states; // file order
    std::vector<std::uint64_t> sizes;
    std::vector<std::size_t> operators;
};

inline CatalogFile catalog_file_from_json(const json& j) {
    try {
        if (j.value("format", "") != "mecchain-catalog") throw FormatError("not a catalog file");
        if (j.at("version").get<int>() != kCatalogVersion)
            throw FormatError("unsupported catalog version " + j.at("version").dump());
        CatalogFile f;
        f.p = j.at("p").get<int>();
        f.n_max = j.at("max_edges").get<int>();
        for (const auto& s : j.at("states")) {
            f.states.push_back(cpdag_from_json(s.at("graph")));
            f.sizes.push_back(s.at("size").get<std::uint64_t>());
            f.operators.push_back(s.at("operators").get<std::size_t>());
        }
        return f;
    } catch (const json::exception& ex) {
        throw FormatError(std::string("catalog: ") + ex.what());
    }
}

/// Verifies a catalog read from disk: each state's recorded size and
/// operator count, completeness against a fresh enumeration when feasible,
/// and perfectness of the operator sets over exactly the listed states.
struct CatalogCheck {
    PerfectnessReport perfect;
    std::vector<std::string> problems;
    bool passed() const { return perfect.passed() && problems.empty(); }
};

inline CatalogCheck check_catalog_file(const CatalogFile& f, std::size_t max_witnesses = 10) {
    CatalogCheck out;
    auto problem = [&](std::string s) {
        if (out.problems.size() < max_witnesses) out.problems.push_back(std::move(s));
        else if (out.problems.size() == max_witnesses) out.problems.push_back("...");
    };
    StateSpaceCatalog cat;
    cat.p = f.p;
    cat.n_max = f.n_max;
    std::vector<std::size_t> order(f.states.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return f.states[a] < f.states[b]; });
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto i = order[k];
        if (k > 0 && f.states[order[k - 1]] == f.states[i])
            problem("duplicate state " + to_string(f.states[i]));
        if (f.states[i].num_vertices() != f.p) problem("state " + to_string(f.states[i]) + " has the wrong p");
        if (static_cast<long>(f.states[i].num_edges()) > f.n_max)
            problem("state " + to_string(f.states[i]) + " exceeds the edge budget");
        cat.states.push_back(f.states[i]);
    }
    build_transitions(cat);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto i = order[k];
        const auto size = mec_size(cat.states[k]);
        cat.sizes.push_back(size);
        if (size != f.sizes[i])
            problem("state " + to_string(cat.states[k]) + " records size " + std::to_string(f.sizes[i]) +
                    ", actual " + std::to_string(size));
        if (cat.operator_sets[k].size() != f.operators[i])
            problem("state " + to_string(cat.states[k]) + " records " + std::to_string(f.operators[i]) +
                    " operators, actual " + std::to_string(cat.operator_sets[k].size()));
    }
    if (f.p <= kDefaultMaxEnumerationP) {
        const auto fresh = enumerate_mecs(f.p, f.n_max);
        for (const auto& s : fresh.states)
            if (!cat.index_of(s)) problem("state " + to_string(s) + " is missing");
    }
    out.perfect = verify_perfect(cat, max_witnesses);
    return out;
}

// ---------------------------------------------------------------------------
// Traces: one header line, then one JSON line per step.

inline constexpr int kTraceVersion = 1;

class TraceWriter {
public:
    /// The full state is written on every state_every-th step and on the
    /// last one; other steps carry only its hash.
    TraceWriter(std::ostream& out, const ChainConfig& cfg, long state_every = 1)
        : out_(out), cfg_(cfg), every_(state_every < 1 ? 1 : state_every) {
        json h{{"format", "mecchain-trace"},
               {"version", kTraceVersion},
               {"code_version", kCodeVersion},
               {"rng", SplitMix64::kAlgorithm},
               {"rounding", kRoundingRule},
               {"state_every", every_},
               {"config", to_json(cfg)}};
        out_ << h.dump() << '\n';
    }

    void operator()(const ChainStep& s) {
        json j{{"t", s.t},
               {"m", s.m_count},
               {"exact", s.exact},
               {"candidates", s.candidates},
               {"checked", s.checked},
               {"resamples", s.resamples},
               {"fallback", s.fallback},
               {"op", s.chosen ? to_json(*s.chosen) : json(nullptr)},
               {"hash", hex64(state_hash(s.state))}};
        if (s.t % every_ == 0 || s.t == cfg_.steps) j["state"] = to_json(s.state);
        out_ << j.dump() << '\n';
    }

private:
    std::ostream& out_;
    ChainConfig cfg_;
    long every_;
};

struct TraceHeader {
    ChainConfig config;
    std::string rng;
    std::string code_version;
    long state_every = 1;
};

inline TraceHeader trace_header_from_json(const json& h) {
    if (h.value("format", "") != "mecchain-trace") throw FormatError("not a trace file");
    if (h.value("version", 0) != kTraceVersion) throw FormatError("unsupported trace version");
    TraceHeader th;
    th.config = config_from_json(h.at("config"));
    th.rng = h.value("rng", "");
    th.code_version = h.value("code_version", "");
    th.state_every = h.value("state_every", 1L);
    return th;
}

/// Streams a trace file, rebuilding elided states by replaying operators
/// and checking every hash.
inline TraceHeader read_trace(std::istream& in, const StepSink& sink) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty trace file");
    TraceHeader th;
    try {
        th = trace_header_from_json(json::parse(line));
    } catch (const json::exception& ex) {
        throw FormatError(std::string("trace header: ") + ex.what());
    }
    CompletedPdag state = th.config.start ? *th.config.start : CompletedPdag::empty(th.config.p);
    std::optional<Operator> pending;
    long expected_t = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ChainStep s;
        try {
            const json j = json::parse(line);
            s.t = j.at("t").get<long>();
            if (s.t != expected_t) throw FormatError("trace step " + std::to_string(s.t) + " out of order");
            if (pending) state = apply(*pending, state);
            if (j.contains("state")) {
                auto recorded = cpdag_from_json(j.at("state"));
                if (!(recorded == state))
                    throw FormatError("trace step " + std::to_string(s.t) + ": replayed state differs");
                state = std::move(recorded);
            }
            if (j.at("hash").get<std::string>() != hex64(state_hash(state)))
                throw FormatError("trace step " + std::to_string(s.t) + ": state hash mismatch");
            s.m_count = j.at("m").get<double>();
            s.exact = j.at("exact").get<bool>();
            s.candidates = j.value("candidates", 0L);
            s.checked = j.value("checked", 0L);
            s.resamples = j.value("resamples", 0L);
            s.fallback = j.value("fallback", false);
            if (!j.at("op").is_null()) s.chosen = operator_from_json(j.at("op"));
        } catch (const json::exception& ex) {
            throw FormatError("trace step " + std::to_string(expected_t) + ": " + ex.what());
        }
        pending = s.chosen;
        s.state = state;
        sink(s);
        ++expected_t;
    }
    return th;
}

inline ChainTrace read_trace(std::istream& in) {
    ChainTrace tr;
    auto th = read_trace(in, [&](const ChainStep& s) { tr.steps.push_back(s); });
    tr.config = th.config;
    tr.rng_algorithm = th.rng;
    return tr;
}

// ---------------------------------------------------------------------------
// Estimator CSVs

inline std::string format_number(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

inline void write_histogram_csv(std::ostream& out, const std::vector<FeatureKind>& kinds,
                                const std::vector<const WeightedHistogram*>& hists, bool header = true) {
    if (header) out << "feature,bin,probability\n";
    for (std::size_t i = 0; i < kinds.size(); ++i)
        for (const auto& [bin, pr] : hists[i]->normalized())
            out << feature_name(kinds[i]) << ',' << format_number(bin) << ',' << format_number(pr) << '\n';
}

inline void write_summary_csv(std::ostream& out, const std::vector<FeatureKind>& kinds,
                              const std::vector<const WeightedHistogram*>& hists) {
    out << "feature,min,q05,q25,median,q75,q95,max,mean\n";
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        const auto q = summarize(*hists[i]);
        out << feature_name(kinds[i]);
        for (double v : {q.min, q.q05, q.q25, q.median, q.q75, q.q95, q.max, hists[i]->mean()})
            out << ',' << format_number(v);
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Run manifests

inline constexpr int kManifestVersion = 1;

struct RunManifest {
    std::string subcommand;
    json config = json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    long steps = 0;

    double kappa() const { return steps > 0 ? wall_seconds / static_cast<double>(steps) : 0.0; }

    json to_json() const {
        return {{"format", "mecchain-manifest"},
                {"version", kManifestVersion},
                {"code_version", kCodeVersion},
                {"subcommand", subcommand},
                {"config", config},
                {"inputs", inputs},
                {"outputs", outputs},
                {"seed", seed},
                {"timings", {{"wall_seconds", wall_seconds}, {"steps", steps}, {"kappa_seconds", kappa()}}}};
    }
};

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << text;
}

} // namespace mecchain
