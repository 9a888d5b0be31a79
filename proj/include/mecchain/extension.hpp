#pragma once

// Conversions between PDAGs, DAGs and completed PDAGs.

#include <string>

#include "mecchain/cpdag.hpp"

namespace mecchain {

/// No consistent extension exists. `eliminated` is the number of vertices
/// removed before the elimination got stuck, `remaining` the stuck subgraph
/// (removed vertices keep their ids but lose all edges).
struct ExtensionFailure {
    int eliminated = 0;
    Pdag remaining;
};

/// Dor-Tarsi: repeatedly remove a vertex x that has no children and whose
/// undirected neighbors are adjacent to every other vertex adjacent to x,
/// orienting x's undirected edges into x. The lowest eligible index goes
/// first.
inline Outcome<Dag, ExtensionFailure> consistent_extension(const Pdag& g) {
    const int p = g.num_vertices();
    Pdag work = g;
    Pdag out = g;
    std::vector<char> alive(p, 1);
    for (int eliminated = 0; eliminated < p; ++eliminated) {
        Vertex pick = -1;
        for (Vertex x = 0; x < p && pick == -1; ++x) {
            if (!alive[x] || !work.children(x).empty()) continue;
            const auto& ne = work.neighbors(x);
            const auto& pa = work.parents(x);
            bool ok = true;
            for (Vertex y : ne) {
                for (Vertex w : ne)
                    if (w != y && !work.adjacent(y, w)) {
                        ok = false;
                        break;
                    }
                if (!ok) break;
                for (Vertex w : pa)
                    if (!work.adjacent(y, w)) {
                        ok = false;
                        break;
                    }
                if (!ok) break;
            }
            if (ok) pick = x;
        }
        if (pick == -1) return ExtensionFailure{eliminated, std::move(work)};
        for (Vertex y : VertexSet(work.neighbors(pick))) {
            out.orient(y, pick);
            work.remove_edge(y, pick);
        }
        for (Vertex w : VertexSet(work.parents(pick))) work.remove_edge(w, pick);
        alive[pick] = 0;
    }
    return detail::Unchecked::dag(std::move(out));
}

namespace detail {

// Would orienting the undirected edge v--u as v->u be forced by rule (a),
// (c) or (d) given the current orientations?
inline bool forced_by_rules(const Pdag& g, Vertex v, Vertex u) {
    for (Vertex w : g.parents(v))
        if (!g.adjacent(w, u)) return true;
    for (Vertex w : g.children(v))
        if (g.has_directed(w, u)) return true;
    const VertexSet cand = set_intersection(g.neighbors(v), g.parents(u));
    for (std::size_t i = 0; i < cand.size(); ++i)
        for (std::size_t j = i + 1; j < cand.size(); ++j)
            if (!g.adjacent(cand[i], cand[j])) return true;
    return false;
}

/// Orients undirected edges of g in place until no rule applies.
inline void close_under_orientation_rules(Pdag& g) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : g.edges()) {
            if (e.kind != EdgeKind::Undirected) continue;
            if (forced_by_rules(g, e.from, e.to)) {
                g.orient(e.from, e.to);
                changed = true;
                break;
            }
            if (forced_by_rules(g, e.to, e.from)) {
                g.orient(e.to, e.from);
                changed = true;
                break;
            }
        }
    }
}

} // namespace detail

/// Essential graph of d: keep only v-structure arrows, then apply the
/// orientation rules to a fixpoint.
inline CompletedPdag dag_to_cpdag(const Dag& d) {
    const Pdag& g = d.graph();
    const int p = g.num_vertices();
    Pdag pattern(p);
    // An arrow u->z survives iff z has another parent nonadjacent to u.
    for (Vertex z = 0; z < p; ++z) {
        const auto& pa = g.parents(z);
        for (Vertex u : pa) {
            bool collider = false;
            for (Vertex w : pa)
                if (w != u && !g.adjacent(u, w)) {
                    collider = true;
                    break;
                }
            if (collider)
                pattern.add_directed(u, z);
            else
                pattern.add_undirected(u, z);
        }
    }
    detail::close_under_orientation_rules(pattern);
    return detail::Unchecked::cpdag(std::move(pattern));
}

/// The completed PDAG of the class represented by g.
inline Outcome<CompletedPdag, ExtensionFailure> pdag_to_cpdag(const Pdag& g) {
    auto ext = consistent_extension(g);
    if (!ext) return ext.error();
    return dag_to_cpdag(ext.value());
}

/// Same skeleton and v-structures.
inline bool markov_equivalent(const Pdag& a, const Pdag& b) {
    return skeleton(a) == skeleton(b) && v_structures(a) == v_structures(b);
}

/// d has the skeleton, arrows and v-structures of g.
inline bool is_consistent_extension(const Dag& d, const Pdag& g) {
    if (!markov_equivalent(d.graph(), g)) return false;
    for (Vertex u = 0; u < g.num_vertices(); ++u)
        for (Vertex v : g.children(u))
            if (!d.graph().has_directed(u, v)) return false;
    return true;
}

} // namespace mecchain
