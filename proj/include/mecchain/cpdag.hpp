#pragma once

#include <string>

#include "mecchain/graph.hpp"
#include "mecchain/outcome.hpp"

namespace mecchain {

class CompletedPdag;
class Dag;

namespace detail {
struct Unchecked;
}

/// A Pdag known to have every edge directed and no directed cycle.
class Dag {
public:
    const Pdag& graph() const { return inner_; }
    int num_vertices() const { return inner_.num_vertices(); }
    std::size_t num_edges() const { return inner_.num_edges(); }

    /// Throws std::invalid_argument unless g is fully directed and acyclic.
    static Dag from_pdag(Pdag g) {
        if (g.num_undirected() != 0) throw std::invalid_argument("Dag: graph has undirected edges");
        if (!is_pdag(g)) throw std::invalid_argument("Dag: graph has a directed cycle");
        return Dag(std::move(g));
    }

    friend bool operator==(const Dag&, const Dag&) = default;
    friend auto operator<=>(const Dag& a, const Dag& b) { return a.inner_ <=> b.inner_; }

private:
    friend struct detail::Unchecked;
    explicit Dag(Pdag g) : inner_(std::move(g)) {}
    Pdag inner_;
};

/// An essential graph: one Markov equivalence class. Obtainable only from
/// validate_cpdag(), dag_to_cpdag() or pdag_to_cpdag().
class CompletedPdag {
public:
    const Pdag& graph() const { return inner_; }
    int num_vertices() const { return inner_.num_vertices(); }
    std::size_t num_edges() const { return inner_.num_edges(); }

    /// The edgeless class on p vertices.
    static CompletedPdag empty(int p) { return CompletedPdag(Pdag(p)); }

    friend bool operator==(const CompletedPdag&, const CompletedPdag&) = default;
    friend auto operator<=>(const CompletedPdag& a, const CompletedPdag& b) {
        return a.inner_ <=> b.inner_;
    }

private:
    friend struct detail::Unchecked;
    explicit CompletedPdag(Pdag g) : inner_(std::move(g)) {}
    Pdag inner_;
};

namespace detail {
/// Construction path for code that has already established the invariant.
struct Unchecked {
    static Dag dag(Pdag g) { return Dag(std::move(g)); }
    static CompletedPdag cpdag(Pdag g) { return CompletedPdag(std::move(g)); }
};
} // namespace detail

inline std::string to_string(const CompletedPdag& c) { return to_string(c.graph()); }
inline std::string to_string(const Dag& d) { return to_string(d.graph()); }

/// First violated essential-graph condition (1..4) and a readable witness.
struct CpdagViolation {
    int condition = 0;
    std::string witness;
};

/// Checks the four characterizing conditions in order:
///   1. chain graph, 2. chordal chain components,
///   3. no induced w->u--v, 4. every arrow strongly protected.
inline Outcome<CompletedPdag, CpdagViolation> validate_cpdag(const Pdag& g) {
    const int p = g.num_vertices();
    if (!is_chain_graph(g)) {
        std::string w;
        for (Vertex u = 0; u < p && w.empty(); ++u)
            for (Vertex v : g.children(u))
                if (has_partially_directed_path_avoiding(g, v, u, {})) {
                    w = "partially directed cycle through " + std::to_string(u) + "->" +
                        std::to_string(v);
                    break;
                }
        return CpdagViolation{1, w};
    }
    {
        std::vector<VertexSet> adj(p);
        for (Vertex v = 0; v < p; ++v) adj[v] = g.neighbors(v);
        if (auto bad = detail::chordality_witness(adj))
            return CpdagViolation{2, "chain component containing vertex " + std::to_string(*bad) +
                                         " is not chordal"};
    }
    for (Vertex u = 0; u < p; ++u)
        for (Vertex w : g.parents(u))
            for (Vertex v : g.neighbors(u))
                if (!g.adjacent(w, v))
                    return CpdagViolation{3, std::to_string(w) + "->" + std::to_string(u) + "--" +
                                                 std::to_string(v) + " is induced"};
    for (Vertex v = 0; v < p; ++v)
        for (Vertex u : g.children(v))
            if (!is_strongly_protected(g, v, u))
                return CpdagViolation{4, std::to_string(v) + "->" + std::to_string(u) +
                                             " is not strongly protected"};
    return detail::Unchecked::cpdag(g);
}

/// Chain components of a completed PDAG.
inline std::vector<ChainComponent> chain_components(const CompletedPdag& c,
                                                    bool include_singletons = false) {
    return chain_components(c.graph(), include_singletons);
}

} // namespace mecchain
