#pragma once

// Exhaustive ground truth for small p: every DAG, every equivalence class,
// class sizes, exact distributions and machine checks of the chain's
// operator-set properties and stationarity.

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "mecchain/catalog.hpp"

namespace mecchain {

/// A brute-force routine was asked for more than it can enumerate.
struct LimitExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Largest p enumerated without explicit opt-in; p = 6 (3.78M DAGs) needs
/// allow_p6, anything above is refused.
inline constexpr int kDefaultMaxEnumerationP = 5;

/// All labeled DAGs on p vertices with at most n_max edges.
inline std::vector<Dag> enumerate_dags(int p, int n_max, bool allow_p6 = false) {
    if (p < 0) throw std::invalid_argument("enumerate_dags: negative p");
    if (p > 6 || (p == 6 && !allow_p6))
        throw LimitExceeded("enumerate_dags: p=" + std::to_string(p) + " is beyond the enumeration limit");
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) pairs.emplace_back(i, j);

    std::vector<std::uint32_t> out_mask(p, 0); // children bitmask
    std::vector<Dag> result;

    auto reaches = [&](int from, int to) {
        std::uint32_t seen = 1u << from, frontier = 1u << from;
        while (frontier) {
            std::uint32_t next = 0;
            for (std::uint32_t f = frontier; f; f &= f - 1) next |= out_mask[std::countr_zero(f)];
            next &= ~seen;
            if (next >> to & 1u) return true;
            seen |= next;
            frontier = next;
        }
        return false;
    };

    std::function<void(std::size_t, int)> rec = [&](std::size_t k, int edges) {
        if (k == pairs.size()) {
            Pdag g(p);
            for (int u = 0; u < p; ++u)
                for (std::uint32_t m = out_mask[u]; m; m &= m - 1) g.add_directed(u, std::countr_zero(m));
            result.push_back(detail::Unchecked::dag(std::move(g)));
            return;
        }
        const auto [i, j] = pairs[k];
        rec(k + 1, edges);
        if (edges >= n_max) return;
        if (!reaches(j, i)) {
            out_mask[i] |= 1u << j;
            rec(k + 1, edges + 1);
            out_mask[i] &= ~(1u << j);
        }
        if (!reaches(i, j)) {
            out_mask[j] |= 1u << i;
            rec(k + 1, edges + 1);
            out_mask[j] &= ~(1u << i);
        }
    };
    rec(0, 0);
    return result;
}

/// Groups DAGs by (skeleton, v-structures); one completed PDAG per group.
/// Throws std::logic_error if members of a group disagree on their CPDAG.
inline StateSpaceCatalog enumerate_mecs(int p, int n_max, const ConditionToggles& toggles = {},
                                        bool allow_p6 = false) {
    using Key = std::pair<Pdag, std::vector<VStructure>>;
    std::map<Key, std::pair<CompletedPdag, std::uint64_t>> groups;
    for (const auto& d : enumerate_dags(p, n_max, allow_p6)) {
        Key key{skeleton(d.graph()), v_structures(d.graph())};
        auto c = dag_to_cpdag(d);
        auto it = groups.find(key);
        if (it == groups.end()) {
            groups.emplace(std::move(key), std::make_pair(std::move(c), std::uint64_t{1}));
        } else {
            if (!(it->second.first == c))
                throw std::logic_error("enumerate_mecs: equivalent DAGs completed differently: " +
                                       to_string(it->second.first) + " vs " + to_string(c));
            ++it->second.second;
        }
    }
    std::vector<std::pair<CompletedPdag, std::uint64_t>> rows;
    for (auto& [k, v] : groups) rows.push_back(std::move(v));
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    StateSpaceCatalog cat;
    cat.p = p;
    cat.n_max = n_max;
    cat.conditions = toggles;
    for (auto& [c, n] : rows) {
        cat.states.push_back(std::move(c));
        cat.sizes.push_back(n);
    }
    build_transitions(cat);
    return cat;
}

namespace detail {

/// Number of acyclic orientations without v-structures of an undirected
/// graph given by bitmask adjacency (at most 32 vertices). Sinks of such an
/// orientation are simplicial, and deleting any independent set of sinks
/// leaves another one, so inclusion-exclusion over sink sets counts them.
class MoralOrientationCounter {
public:
    explicit MoralOrientationCounter(std::vector<std::uint32_t> adj) : adj_(std::move(adj)) {}

    std::uint64_t count(std::uint32_t mask) {
        if (std::popcount(mask) <= 1) return 1;
        if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
        std::uint64_t result;
        const std::uint32_t first = component_of(mask);
        if (first != mask) {
            result = checked_mul(count(first), count(mask & ~first));
        } else {
            std::vector<int> simplicial;
            for (std::uint32_t m = mask; m; m &= m - 1) {
                const int v = std::countr_zero(m);
                const std::uint32_t nb = adj_[v] & mask;
                bool clique = true;
                for (std::uint32_t q = nb; q && clique; q &= q - 1) {
                    const int w = std::countr_zero(q);
                    if ((nb & ~(1u << w) & ~adj_[w]) != 0) clique = false;
                }
                if (clique) simplicial.push_back(v);
            }
            __int128 total = 0;
            sum_over_sink_sets(mask, simplicial, 0, 0, 0, total);
            if (total < 0 || total > static_cast<__int128>(UINT64_MAX))
                throw std::overflow_error("mec_size: count does not fit in 64 bits");
            result = static_cast<std::uint64_t>(total);
        }
        memo_.emplace(mask, result);
        return result;
    }

private:
    static std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
        std::uint64_t r;
        if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("mec_size: count overflow");
        return r;
    }

    std::uint32_t component_of(std::uint32_t mask) const {
        std::uint32_t seen = mask & (~mask + 1), frontier = seen;
        while (frontier) {
            std::uint32_t next = 0;
            for (std::uint32_t f = frontier; f; f &= f - 1) next |= adj_[std::countr_zero(f)];
            next &= mask & ~seen;
            seen |= next;
            frontier = next;
        }
        return seen;
    }

    void sum_over_sink_sets(std::uint32_t mask, const std::vector<int>& simp, std::size_t i,
                            std::uint32_t chosen, std::uint32_t forbidden, __int128& total) {
        if (i == simp.size()) {
            if (chosen == 0) return;
            const int sign = (std::popcount(chosen) % 2 == 1) ? 1 : -1;
            total += sign * static_cast<__int128>(count(mask & ~chosen));
            return;
        }
        sum_over_sink_sets(mask, simp, i + 1, chosen, forbidden, total);
        const int v = simp[i];
        if (!(forbidden >> v & 1u))
            sum_over_sink_sets(mask, simp, i + 1, chosen | (1u << v), forbidden | adj_[v], total);
    }

    std::vector<std::uint32_t> adj_;
    std::unordered_map<std::uint32_t, std::uint64_t> memo_;
};

} // namespace detail

inline constexpr int kDefaultComponentCap = 16;

/// Number of DAGs in the class: product over chain components of the number
/// of acyclic, v-structure-free orientations of the component.
inline std::uint64_t mec_size(const CompletedPdag& c, int component_cap = kDefaultComponentCap) {
    std::uint64_t total = 1;
    for (const auto& comp : chain_components(c)) {
        const int k = static_cast<int>(comp.vertices.size());
        if (k > component_cap || k > 32)
            throw LimitExceeded("mec_size: chain component of size " + std::to_string(k) +
                                " exceeds the cap of " + std::to_string(component_cap));
        std::vector<std::uint32_t> adj(k, 0);
        auto local = [&](Vertex v) {
            return static_cast<int>(std::lower_bound(comp.vertices.begin(), comp.vertices.end(), v) -
                                    comp.vertices.begin());
        };
        for (auto [u, v] : comp.edges) {
            adj[local(u)] |= 1u << local(v);
            adj[local(v)] |= 1u << local(u);
        }
        detail::MoralOrientationCounter counter(std::move(adj));
        const std::uint32_t all = (k == 32) ? 0xFFFFFFFFu : ((1u << k) - 1u);
        const std::uint64_t n = counter.count(all);
        if (__builtin_mul_overflow(total, n, &total)) throw std::overflow_error("mec_size: overflow");
    }
    return total;
}

/// Exact distribution of f(u) for u uniform over the catalog states.
inline std::map<double, double> true_distribution(
    const StateSpaceCatalog& cat, const std::function<double(const CompletedPdag&)>& f) {
    std::map<double, double> out;
    for (const auto& s : cat.states) out[f(s)] += 1.0;
    for (auto& [k, v] : out) v /= static_cast<double>(cat.size());
    return out;
}

/// Exact size distribution as counts: size -> number of classes.
inline std::map<std::uint64_t, std::uint64_t> size_histogram(const StateSpaceCatalog& cat) {
    std::map<std::uint64_t, std::uint64_t> out;
    for (auto n : cat.sizes) ++out[n];
    return out;
}

// ---------------------------------------------------------------------------
// Perfectness

struct PerfectnessReport {
    bool validity = true;
    bool distinguishability = true;
    bool reversibility = true;
    bool irreducibility = true;
    std::vector<std::string> counterexamples;

    bool passed() const { return validity && distinguishability && reversibility && irreducibility; }
};

namespace detail {

inline int count_reachable(const std::vector<std::vector<int>>& graph, int start) {
    std::vector<char> seen(graph.size(), 0);
    std::vector<int> stack{start};
    seen[start] = 1;
    int n = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : graph[u])
            if (v >= 0 && !seen[v]) {
                seen[v] = 1;
                ++n;
                stack.push_back(v);
            }
    }
    return n;
}

} // namespace detail

inline PerfectnessReport verify_perfect(const StateSpaceCatalog& cat, std::size_t max_witnesses = 10) {
    PerfectnessReport rep;
    auto note = [&](bool& flag, std::string msg) {
        flag = false;
        if (rep.counterexamples.size() < max_witnesses) rep.counterexamples.push_back(std::move(msg));
    };
    const int n = static_cast<int>(cat.size());
    for (int i = 0; i < n; ++i) {
        const auto& src = cat.states[i];
        const auto& set = cat.operator_sets[i];
        std::vector<int> seen_targets;
        for (std::size_t k = 0; k < set.size(); ++k) {
            const auto& op = set.ops[k];
            const std::string where = to_string(op) + " on " + to_string(src);
            auto r = resulting_cpdag(op, src);
            if (!r) {
                note(rep.validity, "validity: no consistent extension for " + where);
                continue;
            }
            const auto& res = r.value();
            if (res == src) note(rep.validity, "validity: " + where + " does not change the state");
            if (!validate_cpdag(res.graph())) note(rep.validity, "validity: result of " + where + " is not a CPDAG");
            if (static_cast<long>(res.num_edges()) > cat.n_max)
                note(rep.validity, "validity: " + where + " exceeds the edge budget");
            if (!modified_edges_survive(op, res.graph()))
                note(rep.validity, "validity: modified edges of " + where + " do not survive");
            const int j = cat.successors[i][k];
            if (j < 0) {
                note(rep.validity, "validity: result of " + where + " is not in the state space");
                continue;
            }
            if (std::find(seen_targets.begin(), seen_targets.end(), j) != seen_targets.end())
                note(rep.distinguishability, "distinguishability: two operators on " + to_string(src) +
                                                 " reach " + to_string(cat.states[j]));
            seen_targets.push_back(j);

            const Operator back = reverse_of(op);
            const auto& tset = cat.operator_sets[j];
            auto pos = std::find(tset.ops.begin(), tset.ops.end(), back);
            if (pos == tset.ops.end()) {
                note(rep.reversibility, "reversibility: " + to_string(back) + " is not available on " +
                                            to_string(cat.states[j]) + " (reached by " + where + ")");
            } else if (cat.successors[j][pos - tset.ops.begin()] != i) {
                note(rep.reversibility, "reversibility: " + to_string(back) + " on " +
                                            to_string(cat.states[j]) + " does not return to " +
                                            to_string(src));
            }
        }
    }
    if (n > 0) {
        std::vector<std::vector<int>> reverse_graph(n);
        for (int i = 0; i < n; ++i)
            for (int j : cat.successors[i])
                if (j >= 0) reverse_graph[j].push_back(i);
        if (detail::count_reachable(cat.successors, 0) != n ||
            detail::count_reachable(reverse_graph, 0) != n)
            note(rep.irreducibility, "irreducibility: transition graph is not strongly connected");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Stationarity

/// Exact rational with 64-bit parts, always reduced, positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        Rational l(a.num, b.den), r(b.num, a.den); // cross-reduce first
        std::int64_t n, d;
        if (__builtin_mul_overflow(l.num, r.num, &n) || __builtin_mul_overflow(l.den, r.den, &d))
            throw std::overflow_error("Rational: overflow");
        return Rational(n, d);
    }
    friend bool operator==(const Rational&, const Rational&) = default;
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct BalanceReport {
    bool detailed_balance = true;  // exact, every ordered pair
    bool global_balance = true;    // floating point, within 1e-12
    double max_global_residual = 0.0;
    std::vector<std::string> counterexamples;

    bool passed() const { return detailed_balance && global_balance; }
};

/// Transition probabilities from the operator sets, pi proportional to the
/// operator counts; checks pi_i P_ij = pi_j P_ji exactly and pi = pi P.
inline BalanceReport verify_detailed_balance(const StateSpaceCatalog& cat) {
    BalanceReport rep;
    const int n = static_cast<int>(cat.size());
    std::int64_t total = 0;
    for (const auto& s : cat.operator_sets) total += static_cast<std::int64_t>(s.size());
    if (total == 0) {
        rep.detailed_balance = rep.global_balance = false;
        rep.counterexamples.push_back("no operators at all");
        return rep;
    }
    std::vector<Rational> pi(n);
    for (int i = 0; i < n; ++i) pi[i] = Rational(static_cast<std::int64_t>(cat.operator_sets[i].size()), total);

    // Sparse transition counts.
    std::vector<std::map<int, std::int64_t>> counts(n);
    for (int i = 0; i < n; ++i)
        for (int j : cat.successors[i]) {
            if (j < 0) {
                rep.detailed_balance = false;
                rep.counterexamples.push_back("transition out of the state space from " +
                                              to_string(cat.states[i]));
                continue;
            }
            ++counts[i][j];
        }
    auto prob = [&](int i, int j) -> Rational {
        auto it = counts[i].find(j);
        if (it == counts[i].end()) return Rational(0);
        return Rational(it->second, static_cast<std::int64_t>(cat.operator_sets[i].size()));
    };
    for (int i = 0; i < n; ++i) {
        for (const auto& [j, c] : counts[i]) {
            if (!(pi[i] * prob(i, j) == pi[j] * prob(j, i))) {
                rep.detailed_balance = false;
                if (rep.counterexamples.size() < 10)
                    rep.counterexamples.push_back("balance fails between " + to_string(cat.states[i]) +
                                                  " and " + to_string(cat.states[j]));
            }
        }
    }
    std::vector<double> flow(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (const auto& [j, c] : counts[i]) flow[j] += pi[i].to_double() * prob(i, j).to_double();
    for (int i = 0; i < n; ++i)
        rep.max_global_residual = std::max(rep.max_global_residual, std::abs(flow[i] - pi[i].to_double()));
    rep.global_balance = rep.max_global_residual <= 1e-12;
    return rep;
}

} // namespace mecchain
