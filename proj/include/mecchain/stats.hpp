#pragma once

// Graph features and 1/M-weighted histograms over chain traces.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mecchain/mcmc.hpp"
#include "mecchain/oracle.hpp"

namespace mecchain {

enum class FeatureKind {
    MecSize,
    DirectedEdgeProportion,
    NumChainComponents,
    MaxChainComponentSize,
    NumVStructures,
    NumUndirectedVStructures,
};

inline const std::vector<FeatureKind>& all_features() {
    static const std::vector<FeatureKind> kinds{
        FeatureKind::MecSize,           FeatureKind::DirectedEdgeProportion,
        FeatureKind::NumChainComponents, FeatureKind::MaxChainComponentSize,
        FeatureKind::NumVStructures,    FeatureKind::NumUndirectedVStructures};
    return kinds;
}

inline const char* feature_name(FeatureKind k) {
    switch (k) {
    case FeatureKind::MecSize: return "mec_size";
    case FeatureKind::DirectedEdgeProportion: return "directed_edge_proportion";
    case FeatureKind::NumChainComponents: return "num_chain_components";
    case FeatureKind::MaxChainComponentSize: return "max_chain_component_size";
    case FeatureKind::NumVStructures: return "num_v_structures";
    case FeatureKind::NumUndirectedVStructures: return "num_undirected_v_structures";
    }
    return "?";
}

inline FeatureKind feature_from_name(const std::string& s) {
    for (auto k : all_features())
        if (s == feature_name(k)) return k;
    throw std::invalid_argument("unknown feature '" + s + "'");
}

inline bool is_integer_feature(FeatureKind k) { return k != FeatureKind::DirectedEdgeProportion; }

struct FeatureOptions {
    /// Count isolated vertices as chain components of size one.
    bool include_singleton_components = false;
    /// Directed-edge proportion reported for the edgeless graph.
    double empty_graph_proportion = 0.0;
    int component_cap = kDefaultComponentCap;
};

inline double feature(const CompletedPdag& c, FeatureKind kind, const FeatureOptions& opt = {}) {
    const Pdag& g = c.graph();
    switch (kind) {
    case FeatureKind::MecSize: return static_cast<double>(mec_size(c, opt.component_cap));
    case FeatureKind::DirectedEdgeProportion:
        if (g.num_edges() == 0) return opt.empty_graph_proportion;
        return static_cast<double>(g.num_directed()) / static_cast<double>(g.num_edges());
    case FeatureKind::NumChainComponents:
        return static_cast<double>(chain_components(c, opt.include_singleton_components).size());
    case FeatureKind::MaxChainComponentSize: {
        std::size_t best = 0;
        for (const auto& comp : chain_components(c, opt.include_singleton_components))
            best = std::max(best, comp.vertices.size());
        return static_cast<double>(best);
    }
    case FeatureKind::NumVStructures: return static_cast<double>(v_structures(g).size());
    case FeatureKind::NumUndirectedVStructures:
        return static_cast<double>(undirected_v_structures(g).size());
    }
    return 0.0;
}

/// Bin value -> accumulated weight. Mergeable.
class WeightedHistogram {
public:
    void add(double value, double weight) {
        if (weight < 0.0) throw std::invalid_argument("WeightedHistogram: negative weight");
        bins_[value] += weight;
        total_ += weight;
    }

    void merge(const WeightedHistogram& other) {
        for (const auto& [v, w] : other.bins_) bins_[v] += w;
        total_ += other.total_;
    }

    const std::map<double, double>& bins() const { return bins_; }
    double total() const { return total_; }
    bool empty() const { return total_ <= 0.0; }

    double probability(double value) const {
        auto it = bins_.find(value);
        return (it == bins_.end() || total_ <= 0.0) ? 0.0 : it->second / total_;
    }

    std::map<double, double> normalized() const {
        std::map<double, double> out;
        for (const auto& [v, w] : bins_) out[v] = w / total_;
        return out;
    }

    /// Smallest bin whose cumulative probability reaches q.
    double quantile(double q) const {
        if (empty()) throw std::logic_error("quantile of an empty histogram");
        if (q <= 0.0) return min();
        double acc = 0.0;
        const double target = q * total_;
        for (const auto& [v, w] : bins_) {
            acc += w;
            if (acc >= target * (1.0 - 1e-12)) return v;
        }
        return bins_.rbegin()->first;
    }

    double min() const {
        for (const auto& [v, w] : bins_)
            if (w > 0.0) return v;
        throw std::logic_error("min of an empty histogram");
    }
    double max() const {
        for (auto it = bins_.rbegin(); it != bins_.rend(); ++it)
            if (it->second > 0.0) return it->first;
        throw std::logic_error("max of an empty histogram");
    }

    double mean() const {
        double s = 0.0;
        for (const auto& [v, w] : bins_) s += v * w;
        return s / total_;
    }

private:
    std::map<double, double> bins_;
    double total_ = 0.0;
};

struct QuantileSummary {
    double min = 0, q05 = 0, q25 = 0, median = 0, q75 = 0, q95 = 0, max = 0;
};

inline QuantileSummary summarize(const WeightedHistogram& h) {
    return {h.min(), h.quantile(0.05), h.quantile(0.25), h.quantile(0.5),
            h.quantile(0.75), h.quantile(0.95), h.max()};
}

struct AggregateOptions {
    FeatureOptions feature;
    /// Bin width for the continuous proportion feature.
    double resolution = 0.01;
};

/// Bin a feature value: integer features are exact, the proportion is
/// floored to a multiple of the resolution.
inline double bin_value(double v, FeatureKind kind, double resolution) {
    if (is_integer_feature(kind)) return v;
    const double k = std::floor(v / resolution + 1e-9);
    return k * resolution;
}

/// Online 1/M-weighted histograms for a set of features.
class TraceAggregator {
public:
    TraceAggregator(ChainConfig cfg, std::vector<FeatureKind> kinds, AggregateOptions opt = {})
        : cfg_(std::move(cfg)), kinds_(std::move(kinds)), opt_(opt), hist_(kinds_.size()) {}

    void add(const ChainStep& s) {
        if (!counts_for_estimate(cfg_, s.t)) return;
        if (!(s.m_count > 0.0)) throw std::invalid_argument("aggregate: nonpositive operator count");
        const double w = 1.0 / s.m_count;
        for (std::size_t i = 0; i < kinds_.size(); ++i)
            hist_[i].add(bin_value(feature(s.state, kinds_[i], opt_.feature), kinds_[i], opt_.resolution), w);
    }

    const std::vector<FeatureKind>& kinds() const { return kinds_; }
    const WeightedHistogram& histogram(std::size_t i) const { return hist_[i]; }
    const WeightedHistogram& histogram(FeatureKind k) const {
        for (std::size_t i = 0; i < kinds_.size(); ++i)
            if (kinds_[i] == k) return hist_[i];
        throw std::invalid_argument("aggregator does not track " + std::string(feature_name(k)));
    }
    void merge(const TraceAggregator& other) {
        for (std::size_t i = 0; i < kinds_.size(); ++i) hist_[i].merge(other.hist_[i]);
    }

private:
    ChainConfig cfg_;
    std::vector<FeatureKind> kinds_;
    AggregateOptions opt_;
    std::vector<WeightedHistogram> hist_;
};

inline WeightedHistogram aggregate(const ChainTrace& tr, FeatureKind kind, const AggregateOptions& opt = {}) {
    TraceAggregator agg(tr.config, {kind}, opt);
    for (const auto& s : tr.steps) agg.add(s);
    return agg.histogram(0);
}

} // namespace mecchain
