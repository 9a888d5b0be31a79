#pragma once

// Partially directed graphs and the predicates that the completed-PDAG
// machinery is phrased in: parents, neighbors, skeletons, v-structures,
// chordality, chain-graph tests and strong protection.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mecchain {

using Vertex = int;
/// Sorted, duplicate-free list of vertex ids.
using VertexSet = std::vector<Vertex>;

enum class EdgeKind : std::uint8_t { Directed, Undirected };

/// One edge. Undirected edges are stored with from < to.
struct Edge {
    Vertex from = 0;
    Vertex to = 0;
    EdgeKind kind = EdgeKind::Undirected;

    friend auto operator<=>(const Edge&, const Edge&) = default;
    friend bool operator==(const Edge&, const Edge&) = default;
};

namespace detail {

inline bool contains(const VertexSet& s, Vertex v) {
    return std::binary_search(s.begin(), s.end(), v);
}

inline void insert_sorted(VertexSet& s, Vertex v) {
    auto it = std::lower_bound(s.begin(), s.end(), v);
    if (it == s.end() || *it != v) s.insert(it, v);
}

inline void erase_sorted(VertexSet& s, Vertex v) {
    auto it = std::lower_bound(s.begin(), s.end(), v);
    if (it != s.end() && *it == v) s.erase(it);
}

inline VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline VertexSet set_union(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace detail

/// Mutable partially directed graph on vertices 0..p-1.
///
/// Each vertex keeps three sorted lists (parents, children, undirected
/// neighbors). At most one edge joins a pair and self-loops are rejected.
/// Acyclicity is not enforced here; see is_pdag().
class Pdag {
public:
    Pdag() = default;
    explicit Pdag(int p) : parents_(check_size(p)), children_(p), neighbors_(p) {}

    int num_vertices() const { return static_cast<int>(parents_.size()); }
    std::size_t num_edges() const { return num_directed_ + num_undirected_; }
    std::size_t num_directed() const { return num_directed_; }
    std::size_t num_undirected() const { return num_undirected_; }

    const VertexSet& parents(Vertex x) const { return parents_[check(x)]; }
    const VertexSet& children(Vertex x) const { return children_[check(x)]; }
    const VertexSet& neighbors(Vertex x) const { return neighbors_[check(x)]; }

    bool has_directed(Vertex u, Vertex v) const {
        check(u);
        check(v);
        return detail::contains(children_[u], v);
    }
    bool has_undirected(Vertex u, Vertex v) const {
        check(u);
        check(v);
        return detail::contains(neighbors_[u], v);
    }
    bool adjacent(Vertex u, Vertex v) const {
        check(u);
        check(v);
        return detail::contains(neighbors_[u], v) || detail::contains(children_[u], v) ||
               detail::contains(parents_[u], v);
    }

    /// All vertices joined to x by any edge, sorted.
    VertexSet adjacents(Vertex x) const {
        VertexSet out = detail::set_union(parents(x), children(x));
        return detail::set_union(out, neighbors_[x]);
    }

    void add_directed(Vertex u, Vertex v) {
        require_free_pair(u, v);
        detail::insert_sorted(children_[u], v);
        detail::insert_sorted(parents_[v], u);
        ++num_directed_;
    }

    void add_undirected(Vertex u, Vertex v) {
        require_free_pair(u, v);
        detail::insert_sorted(neighbors_[u], v);
        detail::insert_sorted(neighbors_[v], u);
        ++num_undirected_;
    }

    /// Removes whatever edge joins u and v; throws if there is none.
    void remove_edge(Vertex u, Vertex v) {
        check(u);
        check(v);
        if (detail::contains(neighbors_[u], v)) {
            detail::erase_sorted(neighbors_[u], v);
            detail::erase_sorted(neighbors_[v], u);
            --num_undirected_;
        } else if (detail::contains(children_[u], v)) {
            detail::erase_sorted(children_[u], v);
            detail::erase_sorted(parents_[v], u);
            --num_directed_;
        } else if (detail::contains(children_[v], u)) {
            detail::erase_sorted(children_[v], u);
            detail::erase_sorted(parents_[u], v);
            --num_directed_;
        } else {
            throw std::invalid_argument("remove_edge: no edge between " + std::to_string(u) +
                                        " and " + std::to_string(v));
        }
    }

    /// Turns the undirected edge u--v into u->v.
    void orient(Vertex u, Vertex v) {
        if (!has_undirected(u, v))
            throw std::invalid_argument("orient: no undirected edge " + std::to_string(u) +
                                        "--" + std::to_string(v));
        detail::erase_sorted(neighbors_[u], v);
        detail::erase_sorted(neighbors_[v], u);
        --num_undirected_;
        detail::insert_sorted(children_[u], v);
        detail::insert_sorted(parents_[v], u);
        ++num_directed_;
    }

    /// Turns the directed edge u->v into u--v.
    void undirect(Vertex u, Vertex v) {
        if (!has_directed(u, v))
            throw std::invalid_argument("undirect: no directed edge " + std::to_string(u) +
                                        "->" + std::to_string(v));
        detail::erase_sorted(children_[u], v);
        detail::erase_sorted(parents_[v], u);
        --num_directed_;
        detail::insert_sorted(neighbors_[u], v);
        detail::insert_sorted(neighbors_[v], u);
        ++num_undirected_;
    }

    /// Canonical edge list: sorted by (from, to, kind), undirected stored from < to.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(num_edges());
        for (Vertex u = 0; u < num_vertices(); ++u) {
            // Merge children and larger neighbors so the list comes out sorted.
            auto c = children_[u].begin();
            auto n = std::upper_bound(neighbors_[u].begin(), neighbors_[u].end(), u);
            while (c != children_[u].end() || n != neighbors_[u].end()) {
                if (n == neighbors_[u].end() || (c != children_[u].end() && *c < *n)) {
                    out.push_back({u, *c++, EdgeKind::Directed});
                } else {
                    out.push_back({u, *n++, EdgeKind::Undirected});
                }
            }
        }
        return out;
    }

    friend bool operator==(const Pdag& a, const Pdag& b) {
        return a.children_ == b.children_ && a.neighbors_ == b.neighbors_;
    }

    /// Lexicographic on (p, canonical edge list).
    friend std::strong_ordering operator<=>(const Pdag& a, const Pdag& b) {
        if (auto c = a.num_vertices() <=> b.num_vertices(); c != 0) return c;
        const auto ea = a.edges();
        const auto eb = b.edges();
        return std::lexicographical_compare_three_way(ea.begin(), ea.end(), eb.begin(), eb.end());
    }

private:
    static int check_size(int p) {
        if (p < 0) throw std::invalid_argument("Pdag: negative vertex count");
        return p;
    }

    Vertex check(Vertex x) const {
        if (x < 0 || x >= num_vertices())
            throw std::out_of_range("vertex " + std::to_string(x) + " out of range [0, " +
                                    std::to_string(num_vertices()) + ")");
        return x;
    }

    void require_free_pair(Vertex u, Vertex v) {
        if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
        if (adjacent(u, v))
            throw std::invalid_argument("vertices " + std::to_string(u) + " and " +
                                        std::to_string(v) + " are already adjacent");
    }

    std::vector<VertexSet> parents_;
    std::vector<VertexSet> children_;
    std::vector<VertexSet> neighbors_;
    std::size_t num_directed_ = 0;
    std::size_t num_undirected_ = 0;
};

inline std::string to_string(const Pdag& g) {
    std::ostringstream os;
    os << "{p=" << g.num_vertices() << ":";
    bool first = true;
    for (const auto& e : g.edges()) {
        os << (first ? " " : ", ") << e.from << (e.kind == EdgeKind::Directed ? "->" : "--") << e.to;
        first = false;
    }
    os << "}";
    return os.str();
}

/// Collider x->z<-y with x, y nonadjacent, normalized x < y.
struct VStructure {
    Vertex x = 0;
    Vertex z = 0;
    Vertex y = 0;

    friend bool operator==(const VStructure&, const VStructure&) = default;
    /// Ordered by (z, x, y).
    friend auto operator<=>(const VStructure& a, const VStructure& b) {
        return std::tie(a.z, a.x, a.y) <=> std::tie(b.z, b.x, b.y);
    }
};

/// Induced undirected path x--z--y with x, y nonadjacent, normalized x < y.
using UndirectedVStructure = VStructure;

struct ChainComponent {
    VertexSet vertices;
    std::vector<std::pair<Vertex, Vertex>> edges; // u < v
};

// ---------------------------------------------------------------------------
// Local sets

inline VertexSet neighbors(const Pdag& g, Vertex x) { return g.neighbors(x); }
inline VertexSet parents(const Pdag& g, Vertex x) { return g.parents(x); }

inline VertexSet common_neighbors(const Pdag& g, Vertex x, Vertex y) {
    return detail::set_intersection(g.neighbors(x), g.neighbors(y));
}

/// Parents of x that are undirected neighbors of y.
inline VertexSet omega(const Pdag& g, Vertex x, Vertex y) {
    return detail::set_intersection(g.parents(x), g.neighbors(y));
}

inline VertexSet common_children(const Pdag& g, Vertex x, Vertex y) {
    return detail::set_intersection(g.children(x), g.children(y));
}

/// Every pair in s is adjacent.
inline bool is_clique(const Pdag& g, const VertexSet& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            if (!g.adjacent(s[i], s[j])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Whole-graph views

inline Pdag skeleton(const Pdag& g) {
    Pdag out(g.num_vertices());
    for (const auto& e : g.edges()) out.add_undirected(e.from, e.to);
    return out;
}

inline std::vector<VStructure> v_structures(const Pdag& g) {
    std::vector<VStructure> out;
    for (Vertex z = 0; z < g.num_vertices(); ++z) {
        const auto& pa = g.parents(z);
        for (std::size_t i = 0; i < pa.size(); ++i)
            for (std::size_t j = i + 1; j < pa.size(); ++j)
                if (!g.adjacent(pa[i], pa[j])) out.push_back({pa[i], z, pa[j]});
    }
    return out;
}

inline std::vector<UndirectedVStructure> undirected_v_structures(const Pdag& g) {
    std::vector<UndirectedVStructure> out;
    for (Vertex z = 0; z < g.num_vertices(); ++z) {
        const auto& ne = g.neighbors(z);
        for (std::size_t i = 0; i < ne.size(); ++i)
            for (std::size_t j = i + 1; j < ne.size(); ++j)
                if (!g.adjacent(ne[i], ne[j])) out.push_back({ne[i], z, ne[j]});
    }
    return out;
}

/// Connected components of the undirected-edge subgraph. Isolated vertices
/// (no incident undirected edge) are skipped unless include_singletons.
inline std::vector<ChainComponent> chain_components(const Pdag& g, bool include_singletons = false) {
    const int p = g.num_vertices();
    std::vector<int> comp(p, -1);
    std::vector<ChainComponent> out;
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < p; ++s) {
        if (comp[s] != -1) continue;
        if (g.neighbors(s).empty() && !include_singletons) continue;
        const int id = static_cast<int>(out.size());
        out.emplace_back();
        comp[s] = id;
        stack.assign(1, s);
        while (!stack.empty()) {
            Vertex u = stack.back();
            stack.pop_back();
            out[id].vertices.push_back(u);
            for (Vertex v : g.neighbors(u)) {
                if (u < v) out[id].edges.emplace_back(u, v);
                if (comp[v] == -1) {
                    comp[v] = id;
                    stack.push_back(v);
                }
            }
        }
        std::sort(out[id].vertices.begin(), out[id].vertices.end());
        std::sort(out[id].edges.begin(), out[id].edges.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Structural predicates

namespace detail {

/// Maximum cardinality search over an undirected adjacency followed by a
/// perfect-elimination check. Returns a vertex at which the check fails.
inline std::optional<Vertex> chordality_witness(const std::vector<VertexSet>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> weight(n, 0);
    std::vector<int> position(n, -1);
    std::vector<Vertex> order;
    order.reserve(n);
    // Buckets by weight give O(n + m); at the sizes involved a linear scan is
    // just as fast and simpler to get right.
    for (int step = 0; step < n; ++step) {
        Vertex best = -1;
        for (Vertex v = 0; v < n; ++v)
            if (position[v] == -1 && (best == -1 || weight[v] > weight[best])) best = v;
        position[best] = step;
        order.push_back(best);
        for (Vertex w : adj[best])
            if (position[w] == -1) ++weight[w];
    }
    // order is the reverse of a perfect elimination ordering iff chordal:
    // for each v, its earlier neighbors minus the latest one must be
    // adjacent to that latest one.
    for (Vertex v : order) {
        Vertex latest = -1;
        for (Vertex w : adj[v])
            if (position[w] < position[v] && (latest == -1 || position[w] > position[latest]))
                latest = w;
        if (latest == -1) continue;
        for (Vertex w : adj[v])
            if (w != latest && position[w] < position[v] && !contains(adj[latest], w)) return v;
    }
    return std::nullopt;
}

} // namespace detail

/// Chordality of the skeleton of g (orientations ignored).
inline bool is_chordal(const Pdag& g) {
    std::vector<VertexSet> adj(g.num_vertices());
    for (Vertex v = 0; v < g.num_vertices(); ++v) adj[v] = g.adjacents(v);
    return !detail::chordality_witness(adj).has_value();
}

/// No directed cycle (undirected edges ignored).
inline bool is_pdag(const Pdag& g) {
    const int p = g.num_vertices();
    std::vector<int> indegree(p);
    std::vector<Vertex> ready;
    for (Vertex v = 0; v < p; ++v) {
        indegree[v] = static_cast<int>(g.parents(v).size());
        if (indegree[v] == 0) ready.push_back(v);
    }
    int seen = 0;
    while (!ready.empty()) {
        Vertex u = ready.back();
        ready.pop_back();
        ++seen;
        for (Vertex c : g.children(u))
            if (--indegree[c] == 0) ready.push_back(c);
    }
    return seen == p;
}

/// True iff g has no partially directed cycle: no directed edge inside an
/// undirected-connected block, and the blocks are acyclically ordered.
inline bool is_chain_graph(const Pdag& g) {
    const int p = g.num_vertices();
    const auto comps = chain_components(g, true);
    std::vector<int> comp_of(p);
    for (std::size_t i = 0; i < comps.size(); ++i)
        for (Vertex v : comps[i].vertices) comp_of[v] = static_cast<int>(i);
    const int k = static_cast<int>(comps.size());
    std::vector<VertexSet> succ(k);
    std::vector<int> indegree(k, 0);
    for (Vertex u = 0; u < p; ++u)
        for (Vertex v : g.children(u)) {
            if (comp_of[u] == comp_of[v]) return false;
            auto& s = succ[comp_of[u]];
            if (!detail::contains(s, comp_of[v])) {
                detail::insert_sorted(s, comp_of[v]);
                ++indegree[comp_of[v]];
            }
        }
    std::vector<int> ready;
    for (int c = 0; c < k; ++c)
        if (indegree[c] == 0) ready.push_back(c);
    int seen = 0;
    while (!ready.empty()) {
        int c = ready.back();
        ready.pop_back();
        ++seen;
        for (int d : succ[c])
            if (--indegree[d] == 0) ready.push_back(d);
    }
    return seen == k;
}

/// Whether v->u sits in one of the four protecting configurations:
///   (a) w->v->u, w and u nonadjacent
///   (b) v->u<-w, v and w nonadjacent
///   (c) v->w->u together with v->u
///   (d) v--w, v--w1, w->u<-w1, w and w1 nonadjacent
inline bool is_strongly_protected(const Pdag& g, Vertex v, Vertex u) {
    if (!g.has_directed(v, u))
        throw std::invalid_argument("is_strongly_protected: " + std::to_string(v) + "->" +
                                    std::to_string(u) + " is not a directed edge");
    for (Vertex w : g.parents(v))
        if (!g.adjacent(w, u)) return true;
    for (Vertex w : g.parents(u))
        if (w != v && !g.adjacent(v, w)) return true;
    for (Vertex w : g.children(v))
        if (g.has_directed(w, u)) return true;
    const VertexSet cand = detail::set_intersection(g.neighbors(v), g.parents(u));
    for (std::size_t i = 0; i < cand.size(); ++i)
        for (std::size_t j = i + 1; j < cand.size(); ++j)
            if (!g.adjacent(cand[i], cand[j])) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Path queries

namespace detail {

inline std::vector<char> avoid_mask(int p, const VertexSet& avoid) {
    std::vector<char> blocked(p, 0);
    for (Vertex v : avoid) blocked[v] = 1;
    return blocked;
}

template <bool FollowDirected>
bool search_path(const Pdag& g, Vertex from, Vertex to, const VertexSet& avoid) {
    if (from == to) return true;
    std::vector<char> blocked = avoid_mask(g.num_vertices(), avoid);
    if (blocked[from] || blocked[to]) return false;
    std::vector<Vertex> stack{from};
    blocked[from] = 1;
    while (!stack.empty()) {
        Vertex u = stack.back();
        stack.pop_back();
        auto visit = [&](Vertex w) {
            if (w == to) return true;
            if (!blocked[w]) {
                blocked[w] = 1;
                stack.push_back(w);
            }
            return false;
        };
        for (Vertex w : g.neighbors(u))
            if (visit(w)) return true;
        if constexpr (FollowDirected) {
            for (Vertex w : g.children(u))
                if (visit(w)) return true;
        }
    }
    return false;
}

} // namespace detail

/// Undirected path from -> to whose vertices are all outside avoid.
inline bool has_undirected_path_avoiding(const Pdag& g, Vertex from, Vertex to,
                                         const VertexSet& avoid) {
    return detail::search_path<false>(g, from, to, avoid);
}

/// Path from -> to using undirected edges and directed edges in their
/// forward direction, never entering avoid.
inline bool has_partially_directed_path_avoiding(const Pdag& g, Vertex from, Vertex to,
                                                 const VertexSet& avoid) {
    return detail::search_path<true>(g, from, to, avoid);
}

} // namespace mecchain
