#pragma once

// The reversible chain over completed PDAGs, its subsampled variant, and
// the 1/M reweighted estimators built on their traces.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mecchain/catalog.hpp"
#include "mecchain/rng.hpp"

namespace mecchain {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ChainConfig {
    int p = 2;
    int n_max = 1;
    long steps = 0;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    std::optional<CompletedPdag> start; // empty graph when absent
    /// Consecutive empty subsamples tolerated before one exact enumeration.
    int max_resamples = 1000;
    /// Estimators skip the first burn_in steps and keep every thin-th one.
    long burn_in = 0;
    long thin = 1;
};

inline void validate(const ChainConfig& cfg) {
    if (cfg.p < 2) throw ConfigError("p must be at least 2 (p=1 has no operators)");
    if (cfg.n_max < 1) throw ConfigError("max edges must be at least 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
    if (cfg.steps < 0) throw ConfigError("steps must be nonnegative");
    if (cfg.max_resamples < 1) throw ConfigError("max_resamples must be positive");
    if (cfg.burn_in < 0 || cfg.thin < 1) throw ConfigError("burn_in must be >= 0 and thin >= 1");
    if (cfg.start) {
        if (cfg.start->num_vertices() != cfg.p) throw ConfigError("start graph has the wrong vertex count");
        if (static_cast<long>(cfg.start->num_edges()) > cfg.n_max)
            throw ConfigError("start graph exceeds the edge budget");
    }
}

/// Number of candidates to check: alpha * m rounded half away from zero,
/// never below one.
inline long check_count(double alpha, long m) {
    if (m <= 0) return 0;
    return std::min(m, std::max(1L, std::lround(alpha * static_cast<double>(m))));
}

struct ChainStep {
    long t = 0;
    CompletedPdag state = CompletedPdag::empty(0);
    /// Exact operator count, or its estimate under subsampling.
    double m_count = 0.0;
    bool exact = true;
    /// Operator taken out of this state; absent on the last step.
    std::optional<Operator> chosen;
    long candidates = 0;  // m_t
    long checked = 0;     // [alpha m_t]
    long resamples = 0;   // empty subsamples discarded before this one
    bool fallback = false; // exact enumeration after max_resamples
};

using StepSink = std::function<void(const ChainStep&)>;

struct ChainTrace {
    ChainConfig config;
    std::string rng_algorithm = SplitMix64::kAlgorithm;
    std::vector<ChainStep> steps;
};

/// Perfect operators among a random subset of the candidates.
struct Subsample {
    long candidates = 0;
    long checked = 0;
    std::vector<Operator> ops;
    std::vector<std::optional<CompletedPdag>> results;

    double estimate() const {
        return checked == 0 ? 0.0
                            : static_cast<double>(candidates) * static_cast<double>(ops.size()) /
                                  static_cast<double>(checked);
    }
};

/// Draws [alpha m] candidates without replacement (all of them when that
/// is m, consuming no randomness) and keeps the perfect ones in candidate
/// order.
inline Subsample subsample_operators(const CompletedPdag& c, const std::vector<Operator>& candidates,
                                     int n_max, double alpha, SplitMix64& rng,
                                     const ConditionToggles& toggles = {}) {
    Subsample s;
    const long m = static_cast<long>(candidates.size());
    s.candidates = m;
    s.checked = check_count(alpha, m);
    std::vector<long> picked;
    if (s.checked == m) {
        picked.resize(m);
        std::iota(picked.begin(), picked.end(), 0L);
    } else {
        std::vector<long> idx(m);
        std::iota(idx.begin(), idx.end(), 0L);
        for (long i = 0; i < s.checked; ++i) {
            const long j = i + static_cast<long>(rng.uniform(static_cast<std::uint64_t>(m - i)));
            std::swap(idx[i], idx[j]);
        }
        picked.assign(idx.begin(), idx.begin() + s.checked);
        std::sort(picked.begin(), picked.end());
    }
    for (long i : picked) {
        auto ev = evaluate(candidates[i], c, n_max, toggles);
        if (!ev.member) continue;
        s.ops.push_back(candidates[i]);
        s.results.push_back(std::move(ev.result));
    }
    return s;
}

/// One draw of the subsampled operator-count estimate at a fixed state.
inline double estimate_operator_count(const CompletedPdag& c, int n_max, double alpha, SplitMix64& rng) {
    return subsample_operators(c, enumerate_all_candidates(c, n_max), n_max, alpha, rng).estimate();
}

/// Exact chain: enumerate the full operator set at every state, record its
/// size, move by a uniformly chosen operator. Emits steps t = 0..steps.
inline void run_chain(const ChainConfig& cfg, const StepSink& sink) {
    validate(cfg);
    if (cfg.alpha != 1.0) throw ConfigError("run_chain needs alpha = 1; use run_chain_accelerated");
    SplitMix64 rng(cfg.seed);
    CompletedPdag state = cfg.start ? *cfg.start : CompletedPdag::empty(cfg.p);
    for (long t = 0; t <= cfg.steps; ++t) {
        const auto set = enumerate_operator_set(state, cfg.n_max);
        if (set.size() == 0) throw std::logic_error("run_chain: empty operator set at " + to_string(state));
        ChainStep step;
        step.t = t;
        step.m_count = static_cast<double>(set.size());
        step.candidates = static_cast<long>(census(state, cfg.n_max).candidates);
        step.checked = step.candidates;
        if (t == cfg.steps) {
            step.state = std::move(state);
            sink(step);
            break;
        }
        const auto k = static_cast<std::size_t>(rng.uniform(set.size()));
        step.chosen = set.ops[k];
        CompletedPdag next = set.result(k);
        step.state = std::move(state);
        sink(step);
        state = std::move(next);
    }
}

/// Subsampled chain: check [alpha m_t] random candidates, estimate the
/// operator count from the hit rate, move by a uniformly chosen hit. An empty
/// subsample is redrawn; after max_resamples empty draws the step falls back
/// to exact enumeration and is flagged.
inline void run_chain_accelerated(const ChainConfig& cfg, const StepSink& sink) {
    validate(cfg);
    SplitMix64 rng(cfg.seed);
    CompletedPdag state = cfg.start ? *cfg.start : CompletedPdag::empty(cfg.p);
    for (long t = 0; t <= cfg.steps; ++t) {
        const auto candidates = enumerate_all_candidates(state, cfg.n_max);
        ChainStep step;
        step.t = t;
        step.candidates = static_cast<long>(candidates.size());
        std::vector<Operator> ops;
        std::vector<std::optional<CompletedPdag>> results;
        Subsample s;
        for (;;) {
            s = subsample_operators(state, candidates, cfg.n_max, cfg.alpha, rng);
            if (!s.ops.empty()) break;
            if (++step.resamples >= cfg.max_resamples) break;
        }
        step.checked = s.checked;
        if (!s.ops.empty()) {
            step.m_count = s.estimate();
            step.exact = s.checked == s.candidates;
            ops = std::move(s.ops);
            results = std::move(s.results);
        } else {
            auto set = enumerate_operator_set(state, cfg.n_max);
            if (set.size() == 0)
                throw std::logic_error("run_chain_accelerated: empty operator set at " + to_string(state));
            step.fallback = true;
            step.exact = true;
            step.checked = step.candidates;
            step.m_count = static_cast<double>(set.size());
            ops = std::move(set.ops);
            results = std::move(set.results);
        }
        if (t == cfg.steps) {
            step.state = std::move(state);
            sink(step);
            break;
        }
        const auto k = static_cast<std::size_t>(rng.uniform(ops.size()));
        step.chosen = ops[k];
        CompletedPdag next = results[k] ? std::move(*results[k]) : apply(ops[k], state);
        step.state = std::move(state);
        sink(step);
        state = std::move(next);
    }
}

/// Exact chain when alpha is 1, subsampled otherwise.
inline void simulate(const ChainConfig& cfg, const StepSink& sink) {
    if (cfg.alpha == 1.0)
        run_chain(cfg, sink);
    else
        run_chain_accelerated(cfg, sink);
}

inline ChainTrace run_chain(const ChainConfig& cfg) {
    ChainTrace tr{cfg, SplitMix64::kAlgorithm, {}};
    run_chain(cfg, [&](const ChainStep& s) { tr.steps.push_back(s); });
    return tr;
}

inline ChainTrace run_chain_accelerated(const ChainConfig& cfg) {
    ChainTrace tr{cfg, SplitMix64::kAlgorithm, {}};
    run_chain_accelerated(cfg, [&](const ChainStep& s) { tr.steps.push_back(s); });
    return tr;
}

// ---------------------------------------------------------------------------
// Estimators

using StateFunction = std::function<double(const CompletedPdag&)>;

/// Steps an estimator should use under the config's burn-in and thinning.
inline bool counts_for_estimate(const ChainConfig& cfg, long t) {
    return t >= cfg.burn_in && (t - cfg.burn_in) % cfg.thin == 0;
}

namespace detail {
inline void require_usable(const ChainTrace& tr) {
    if (tr.steps.empty()) throw std::invalid_argument("estimator: empty trace");
    for (const auto& s : tr.steps)
        if (!(s.m_count > 0.0)) throw std::invalid_argument("estimator: nonpositive operator count");
}
} // namespace detail

/// sum I{f(e_t) in A} / M_t  over  sum 1 / M_t.
inline double estimate_probability(const ChainTrace& tr, const StateFunction& f,
                                   const std::function<bool(double)>& in_set) {
    detail::require_usable(tr);
    double num = 0.0, den = 0.0;
    for (const auto& s : tr.steps) {
        if (!counts_for_estimate(tr.config, s.t)) continue;
        const double w = 1.0 / s.m_count;
        den += w;
        if (in_set(f(s.state))) num += w;
    }
    if (den == 0.0) throw std::invalid_argument("estimator: burn-in discards every step");
    return num / den;
}

/// sum f(e_t) / M_t  over  sum 1 / M_t.
inline double estimate_expectation(const ChainTrace& tr, const StateFunction& f) {
    detail::require_usable(tr);
    double num = 0.0, den = 0.0;
    for (const auto& s : tr.steps) {
        if (!counts_for_estimate(tr.config, s.t)) continue;
        const double w = 1.0 / s.m_count;
        den += w;
        num += w * f(s.state);
    }
    if (den == 0.0) throw std::invalid_argument("estimator: burn-in discards every step");
    return num / den;
}

/// Expectation estimates using the first k blocks of block_size steps,
/// for k = 1, 2, ... (a trailing partial block is dropped).
inline std::vector<double> prefix_expectations(const ChainTrace& tr, const StateFunction& f,
                                               long block_size) {
    detail::require_usable(tr);
    if (block_size < 1) throw std::invalid_argument("prefix_expectations: block size must be positive");
    std::vector<double> out;
    double num = 0.0, den = 0.0;
    long in_block = 0;
    for (const auto& s : tr.steps) {
        if (counts_for_estimate(tr.config, s.t)) {
            const double w = 1.0 / s.m_count;
            den += w;
            num += w * f(s.state);
        }
        if (++in_block == block_size) {
            out.push_back(den > 0.0 ? num / den : 0.0);
            in_block = 0;
        }
    }
    return out;
}

/// Exact stationary distribution over an enumerated space: pi_C = M_C / sum M.
inline std::vector<double> stationary_weights(const StateSpaceCatalog& cat) {
    double total = 0.0;
    for (const auto& s : cat.operator_sets) total += static_cast<double>(s.size());
    std::vector<double> pi;
    pi.reserve(cat.size());
    for (const auto& s : cat.operator_sets) pi.push_back(static_cast<double>(s.size()) / total);
    return pi;
}

} // namespace mecchain
