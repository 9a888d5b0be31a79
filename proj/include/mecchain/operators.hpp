#pragma once

// The six edit operators on completed PDAGs, their validity conditions,
// the reversibility-preserving restrictions, and the per-state operator set.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mecchain/extension.hpp"

namespace mecchain {

enum class OpKind : std::uint8_t { InsertU, DeleteU, InsertD, DeleteD, MakeV, RemoveV };

inline const char* kind_name(OpKind k) {
    switch (k) {
    case OpKind::InsertU: return "InsertU";
    case OpKind::DeleteU: return "DeleteU";
    case OpKind::InsertD: return "InsertD";
    case OpKind::DeleteD: return "DeleteD";
    case OpKind::MakeV: return "MakeV";
    case OpKind::RemoveV: return "RemoveV";
    }
    return "?";
}

inline OpKind kind_from_name(const std::string& s) {
    for (auto k : {OpKind::InsertU, OpKind::DeleteU, OpKind::InsertD, OpKind::DeleteD,
                   OpKind::MakeV, OpKind::RemoveV})
        if (s == kind_name(k)) return k;
    throw std::invalid_argument("unknown operator kind '" + s + "'");
}

/// An operator is its kind plus its modified edge(s). Undirected edge kinds
/// and the two v-structure kinds are normalized to x < y; InsertD/DeleteD
/// mean x->y. z is the collider for MakeV/RemoveV and -1 otherwise.
struct Operator {
    OpKind kind = OpKind::InsertU;
    Vertex x = 0;
    Vertex y = 0;
    Vertex z = -1;

    static Operator insert_u(Vertex a, Vertex b) { return {OpKind::InsertU, std::min(a, b), std::max(a, b)}; }
    static Operator delete_u(Vertex a, Vertex b) { return {OpKind::DeleteU, std::min(a, b), std::max(a, b)}; }
    static Operator insert_d(Vertex from, Vertex to) { return {OpKind::InsertD, from, to}; }
    static Operator delete_d(Vertex from, Vertex to) { return {OpKind::DeleteD, from, to}; }
    static Operator make_v(Vertex a, Vertex collider, Vertex b) {
        return {OpKind::MakeV, std::min(a, b), std::max(a, b), collider};
    }
    static Operator remove_v(Vertex a, Vertex collider, Vertex b) {
        return {OpKind::RemoveV, std::min(a, b), std::max(a, b), collider};
    }

    friend auto operator<=>(const Operator&, const Operator&) = default;
    friend bool operator==(const Operator&, const Operator&) = default;
};

inline std::string to_string(const Operator& op) {
    const auto x = std::to_string(op.x), y = std::to_string(op.y), z = std::to_string(op.z);
    switch (op.kind) {
    case OpKind::InsertU:
    case OpKind::DeleteU: return std::string(kind_name(op.kind)) + " " + x + "--" + y;
    case OpKind::InsertD:
    case OpKind::DeleteD: return std::string(kind_name(op.kind)) + " " + x + "->" + y;
    case OpKind::MakeV:
    case OpKind::RemoveV: return std::string(kind_name(op.kind)) + " " + x + "->" + z + "<-" + y;
    }
    return "?";
}

/// Switches for the three conditions that depend on the resulting CPDAG.
/// Everything is on in the real operator set; turning one off builds the
/// negative controls used to show that the condition is needed.
struct ConditionToggles {
    bool iu3 = true;
    bool id3 = true;
    bool dd2 = true;
};

/// Throws std::invalid_argument when op does not fit c's adjacency.
inline void check_compatible(const Operator& op, const Pdag& g) {
    const int p = g.num_vertices();
    auto in_range = [p](Vertex v) { return v >= 0 && v < p; };
    bool ok = in_range(op.x) && in_range(op.y) && op.x != op.y;
    if (ok) switch (op.kind) {
        case OpKind::InsertU:
        case OpKind::InsertD: ok = !g.adjacent(op.x, op.y); break;
        case OpKind::DeleteU: ok = g.has_undirected(op.x, op.y); break;
        case OpKind::DeleteD: ok = g.has_directed(op.x, op.y); break;
        case OpKind::MakeV:
            ok = in_range(op.z) && !g.adjacent(op.x, op.y) && g.has_undirected(op.x, op.z) &&
                 g.has_undirected(op.y, op.z);
            break;
        case OpKind::RemoveV:
            ok = in_range(op.z) && !g.adjacent(op.x, op.y) && g.has_directed(op.x, op.z) &&
                 g.has_directed(op.y, op.z);
            break;
        }
    if (!ok) throw std::invalid_argument(to_string(op) + " does not apply to " + to_string(g));
}

/// The literal edit: c with the modified edge(s) changed and nothing else.
inline Pdag modified_graph(const Operator& op, const CompletedPdag& c) {
    check_compatible(op, c.graph());
    Pdag g = c.graph();
    switch (op.kind) {
    case OpKind::InsertU: g.add_undirected(op.x, op.y); break;
    case OpKind::DeleteU:
    case OpKind::DeleteD: g.remove_edge(op.x, op.y); break;
    case OpKind::InsertD: g.add_directed(op.x, op.y); break;
    case OpKind::MakeV:
        g.orient(op.x, op.z);
        g.orient(op.y, op.z);
        break;
    case OpKind::RemoveV:
        g.undirect(op.x, op.z);
        g.undirect(op.y, op.z);
        break;
    }
    return g;
}

/// Do the modified edges of op appear, with op's orientation, in r?
inline bool modified_edges_survive(const Operator& op, const Pdag& r) {
    switch (op.kind) {
    case OpKind::InsertU: return r.has_undirected(op.x, op.y);
    case OpKind::InsertD: return r.has_directed(op.x, op.y);
    case OpKind::DeleteU:
    case OpKind::DeleteD: return !r.adjacent(op.x, op.y);
    case OpKind::MakeV: return r.has_directed(op.x, op.z) && r.has_directed(op.y, op.z);
    case OpKind::RemoveV: return r.has_undirected(op.x, op.z) && r.has_undirected(op.y, op.z);
    }
    return false;
}

/// Resulting completed PDAG of op, or the extension failure.
inline Outcome<CompletedPdag, ExtensionFailure> resulting_cpdag(const Operator& op,
                                                                const CompletedPdag& c) {
    return pdag_to_cpdag(modified_graph(op, c));
}

/// Validity straight from the definition: the modified graph extends
/// consistently and its modified edges survive completion. Slow; used to
/// cross-check the local conditions.
inline bool is_valid_by_definition(const Operator& op, const CompletedPdag& c) {
    auto r = resulting_cpdag(op, c);
    return r && modified_edges_survive(op, r->graph());
}

namespace detail {

inline bool rv_conditions(const Pdag& g, Vertex x, Vertex z, Vertex y) {
    if (g.parents(x) != g.parents(y)) return false;
    const VertexSet nxy = common_neighbors(g, x, y);
    VertexSet pz = g.parents(z);
    erase_sorted(pz, x);
    erase_sorted(pz, y);
    if (set_union(g.parents(x), nxy) != pz) return false;
    return !has_undirected_path_avoiding(g, x, y, nxy);
}

} // namespace detail

/// Local validity conditions per kind (RemoveV: the three rv conditions,
/// which imply validity).
inline bool is_valid(const Operator& op, const CompletedPdag& c) {
    const Pdag& g = c.graph();
    check_compatible(op, g);
    const Vertex x = op.x, y = op.y;
    switch (op.kind) {
    case OpKind::InsertU:
        return g.parents(x) == g.parents(y) &&
               !has_undirected_path_avoiding(g, x, y, common_neighbors(g, x, y));
    case OpKind::DeleteU: return is_clique(g, common_neighbors(g, x, y));
    case OpKind::InsertD: {
        if (g.parents(x) == g.parents(y)) return false;
        const VertexSet om = omega(g, x, y);
        return is_clique(g, om) && !has_partially_directed_path_avoiding(g, y, x, om);
    }
    case OpKind::DeleteD: return is_clique(g, g.neighbors(y));
    case OpKind::MakeV: return !has_undirected_path_avoiding(g, x, y, common_neighbors(g, x, y));
    case OpKind::RemoveV: return detail::rv_conditions(g, x, op.z, y);
    }
    return false;
}

/// Outcome of checking one candidate: membership, and the resulting CPDAG
/// when the check had to build it.
struct Evaluation {
    bool member = false;
    std::optional<CompletedPdag> result;
};

/// Apply op to c: literal edit followed by completion. An extension failure
/// here means op was not valid and is reported as std::logic_error.
inline CompletedPdag apply(const Operator& op, const CompletedPdag& c) {
    auto r = resulting_cpdag(op, c);
    if (!r)
        throw std::logic_error("apply: " + to_string(op) + " has no consistent extension on " +
                               to_string(c));
    return std::move(r).value();
}

/// Full membership test for the operator set of c under edge budget n_max.
/// Checks run cheapest first; the resulting CPDAG is built only when a
/// condition about it is not vacuous.
inline Evaluation evaluate(const Operator& op, const CompletedPdag& c, int n_max,
                           const ConditionToggles& toggles = {}) {
    const Pdag& g = c.graph();
    const Vertex x = op.x, y = op.y;
    Evaluation ev;
    const bool inserting = op.kind == OpKind::InsertU || op.kind == OpKind::InsertD;
    if (inserting && static_cast<long>(g.num_edges()) >= n_max) return ev;
    if (!is_valid(op, c)) return ev;

    // Arrows a->b that must still be directed in the result.
    std::vector<std::pair<Vertex, Vertex>> arrows;
    switch (op.kind) {
    case OpKind::InsertU:
        if (toggles.iu3)
            for (Vertex u : common_children(g, x, y)) {
                arrows.emplace_back(x, u);
                arrows.emplace_back(y, u);
            }
        break;
    case OpKind::InsertD:
        if (toggles.id3)
            for (Vertex u : common_children(g, x, y)) arrows.emplace_back(y, u);
        break;
    case OpKind::DeleteD:
        if (toggles.dd2)
            for (Vertex v : detail::set_difference(g.parents(y), g.parents(x)))
                if (v != x) arrows.emplace_back(v, y);
        break;
    default: break;
    }
    if (!arrows.empty()) {
        CompletedPdag r = apply(op, c);
        for (auto [a, b] : arrows)
            if (!r.graph().has_directed(a, b)) return ev;
        ev.result = std::move(r);
    }
    ev.member = true;
    return ev;
}

inline bool satisfies_perfect_conditions(const Operator& op, const CompletedPdag& c, int n_max,
                                         const ConditionToggles& toggles = {}) {
    return evaluate(op, c, n_max, toggles).member;
}

/// Every candidate operator before filtering, in a fixed order: DeleteU over
/// undirected edges, DeleteD over arrows, RemoveV over v-structures, MakeV
/// over undirected v-structures, then (only under the budget) InsertU,
/// InsertD x->y, InsertD y->x for each nonadjacent pair x < y.
inline std::vector<Operator> enumerate_all_candidates(const CompletedPdag& c, int n_max) {
    const Pdag& g = c.graph();
    const int p = g.num_vertices();
    std::vector<Operator> out;
    const auto edges = g.edges();
    for (const auto& e : edges)
        if (e.kind == EdgeKind::Undirected) out.push_back(Operator::delete_u(e.from, e.to));
    for (const auto& e : edges)
        if (e.kind == EdgeKind::Directed) out.push_back(Operator::delete_d(e.from, e.to));
    for (const auto& v : v_structures(g)) out.push_back(Operator::remove_v(v.x, v.z, v.y));
    for (const auto& v : undirected_v_structures(g)) out.push_back(Operator::make_v(v.x, v.z, v.y));
    if (static_cast<long>(g.num_edges()) < n_max) {
        std::vector<char> adj(p);
        for (Vertex u = 0; u < p; ++u) {
            std::fill(adj.begin(), adj.end(), 0);
            for (Vertex w : g.adjacents(u)) adj[w] = 1;
            for (Vertex w = u + 1; w < p; ++w) {
                if (adj[w]) continue;
                out.push_back(Operator::insert_u(u, w));
                out.push_back(Operator::insert_d(u, w));
                out.push_back(Operator::insert_d(w, u));
            }
        }
    }
    return out;
}

/// The perfect operators available at a state, with whatever resulting
/// CPDAGs were built while checking them.
struct OperatorSet {
    CompletedPdag source;
    std::vector<Operator> ops;
    std::vector<std::optional<CompletedPdag>> results;

    std::size_t size() const { return ops.size(); }
    bool contains(const Operator& op) const {
        return std::find(ops.begin(), ops.end(), op) != ops.end();
    }
    /// Resulting CPDAG of ops[i], reusing the cached one if present.
    CompletedPdag result(std::size_t i) const {
        if (results[i]) return *results[i];
        return apply(ops[i], source);
    }
};

inline OperatorSet enumerate_operator_set(const CompletedPdag& c, int n_max,
                                          const ConditionToggles& toggles = {}) {
    OperatorSet set{c, {}, {}};
    for (const auto& op : enumerate_all_candidates(c, n_max)) {
        auto ev = evaluate(op, c, n_max, toggles);
        if (!ev.member) continue;
        set.ops.push_back(op);
        set.results.push_back(std::move(ev.result));
    }
    return set;
}

/// The operator that undoes op.
inline Operator reverse_of(const Operator& op) {
    Operator r = op;
    switch (op.kind) {
    case OpKind::InsertU: r.kind = OpKind::DeleteU; break;
    case OpKind::DeleteU: r.kind = OpKind::InsertU; break;
    case OpKind::InsertD: r.kind = OpKind::DeleteD; break;
    case OpKind::DeleteD: r.kind = OpKind::InsertD; break;
    case OpKind::MakeV: r.kind = OpKind::RemoveV; break;
    case OpKind::RemoveV: r.kind = OpKind::MakeV; break;
    }
    return r;
}

/// Counts behind the candidate total: edges, v-structures, undirected
/// v-structures and the number of candidates.
struct CandidateCensus {
    long edges = 0;
    long v_structures = 0;
    long undirected_v_structures = 0;
    long candidates = 0;
};

inline CandidateCensus census(const CompletedPdag& c, int n_max) {
    const Pdag& g = c.graph();
    const long p = g.num_vertices();
    CandidateCensus cc;
    cc.edges = static_cast<long>(g.num_edges());
    cc.v_structures = static_cast<long>(v_structures(g).size());
    cc.undirected_v_structures = static_cast<long>(undirected_v_structures(g).size());
    cc.candidates = cc.edges + cc.v_structures + cc.undirected_v_structures;
    if (cc.edges < n_max) cc.candidates += 3 * (p * (p - 1) / 2 - cc.edges);
    return cc;
}

} // namespace mecchain
