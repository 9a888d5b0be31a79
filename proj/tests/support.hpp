#pragma once

// Graph literals and brute-force reference implementations for tests.
// None of the references call the library routine they are checking.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mecchain/mecchain.hpp"

namespace mctest {

using namespace mecchain;

/// "0->1 1--2" on p vertices.
inline Pdag pdag(int p, const std::string& spec) {
    Pdag g(p);
    std::istringstream in(spec);
    std::string tok;
    while (in >> tok) {
        auto d = tok.find("->");
        auto u = tok.find("--");
        if (d != std::string::npos)
            g.add_directed(std::stoi(tok.substr(0, d)), std::stoi(tok.substr(d + 2)));
        else if (u != std::string::npos)
            g.add_undirected(std::stoi(tok.substr(0, u)), std::stoi(tok.substr(u + 2)));
        else
            throw std::invalid_argument("bad edge token " + tok);
    }
    return g;
}

inline CompletedPdag cpdag(int p, const std::string& spec) {
    auto r = validate_cpdag(pdag(p, spec));
    if (!r) throw std::invalid_argument("not a CPDAG: " + spec + " (" + r.error().witness + ")");
    return r.value();
}

// ---------------------------------------------------------------------------
// Plain adjacency-matrix DAGs

struct Mat {
    int p = 0;
    std::vector<std::vector<char>> a; // a[u][v]: u->v
    explicit Mat(int n) : p(n), a(n, std::vector<char>(n, 0)) {}
};

inline bool acyclic(const Mat& m) {
    std::vector<int> state(m.p, 0);
    std::function<bool(int)> dfs = [&](int u) {
        state[u] = 1;
        for (int v = 0; v < m.p; ++v)
            if (m.a[u][v]) {
                if (state[v] == 1) return false;
                if (state[v] == 0 && !dfs(v)) return false;
            }
        state[u] = 2;
        return true;
    };
    for (int u = 0; u < m.p; ++u)
        if (state[u] == 0 && !dfs(u)) return false;
    return true;
}

/// Every pair gets none, u->v or v->u; acyclic ones kept.
inline std::vector<Mat> all_dags(int p, int max_edges = 1 << 30) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
    std::vector<Mat> out;
    std::vector<int> state(pairs.size(), 0);
    while (true) {
        Mat m(p);
        int edges = 0;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            if (state[k] == 1) m.a[pairs[k].first][pairs[k].second] = 1;
            if (state[k] == 2) m.a[pairs[k].second][pairs[k].first] = 1;
            edges += state[k] != 0;
        }
        if (edges <= max_edges && acyclic(m)) out.push_back(m);
        std::size_t k = 0;
        while (k < state.size() && state[k] == 2) state[k++] = 0;
        if (k == state.size()) break;
        ++state[k];
    }
    return out;
}

using SkelKey = std::vector<std::pair<int, int>>;
using VsKey = std::set<std::tuple<int, int, int>>; // (x, z, y), x < y

inline SkelKey skel_of(const Mat& m) {
    SkelKey s;
    for (int u = 0; u < m.p; ++u)
        for (int v = u + 1; v < m.p; ++v)
            if (m.a[u][v] || m.a[v][u]) s.emplace_back(u, v);
    return s;
}

inline VsKey vs_of(const Mat& m) {
    VsKey s;
    for (int z = 0; z < m.p; ++z)
        for (int x = 0; x < m.p; ++x)
            for (int y = x + 1; y < m.p; ++y)
                if (m.a[x][z] && m.a[y][z] && !m.a[x][y] && !m.a[y][x]) s.insert({x, z, y});
    return s;
}

inline Mat to_mat(const Pdag& g) {
    Mat m(g.num_vertices());
    for (const auto& e : g.edges()) {
        if (e.kind != EdgeKind::Directed) throw std::invalid_argument("to_mat: undirected edge");
        m.a[e.from][e.to] = 1;
    }
    return m;
}

inline Pdag to_pdag(const Mat& m) {
    Pdag g(m.p);
    for (int u = 0; u < m.p; ++u)
        for (int v = 0; v < m.p; ++v)
            if (m.a[u][v]) g.add_directed(u, v);
    return g;
}

/// Essential graph of a class given as its member DAGs: an edge is directed
/// iff every member orients it the same way.
inline Pdag essential_graph(const std::vector<Mat>& members) {
    const Mat& f = members.front();
    Pdag g(f.p);
    for (auto [u, v] : skel_of(f)) {
        bool all_uv = true, all_vu = true;
        for (const auto& m : members) {
            all_uv = all_uv && m.a[u][v];
            all_vu = all_vu && m.a[v][u];
        }
        if (all_uv) g.add_directed(u, v);
        else if (all_vu) g.add_directed(v, u);
        else g.add_undirected(u, v);
    }
    return g;
}

/// All DAGs grouped into Markov equivalence classes by (skeleton, v-structures).
inline std::map<std::pair<SkelKey, VsKey>, std::vector<Mat>> brute_classes(int p, int max_edges = 1 << 30) {
    std::map<std::pair<SkelKey, VsKey>, std::vector<Mat>> out;
    for (auto& m : all_dags(p, max_edges)) out[{skel_of(m), vs_of(m)}].push_back(m);
    return out;
}

/// Orientations of g's undirected edges that are acyclic and add no
/// v-structure: the consistent extensions of g.
inline std::vector<Mat> brute_extensions(const Pdag& g) {
    Mat base(g.num_vertices());
    std::vector<std::pair<int, int>> und;
    for (const auto& e : g.edges()) {
        if (e.kind == EdgeKind::Directed) base.a[e.from][e.to] = 1;
        else und.emplace_back(e.from, e.to);
    }
    const int p = g.num_vertices();
    Mat adj(p);
    for (const auto& e : g.edges()) adj.a[e.from][e.to] = adj.a[e.to][e.from] = 1;
    VsKey want;
    for (int z = 0; z < p; ++z)
        for (int x = 0; x < p; ++x)
            for (int y = x + 1; y < p; ++y)
                if (base.a[x][z] && base.a[y][z] && !adj.a[x][y]) want.insert({x, z, y});
    std::vector<Mat> out;
    for (unsigned mask = 0; mask < (1u << und.size()); ++mask) {
        Mat m = base;
        for (std::size_t k = 0; k < und.size(); ++k) {
            auto [u, v] = und[k];
            if (mask >> k & 1) m.a[v][u] = 1;
            else m.a[u][v] = 1;
        }
        if (acyclic(m) && vs_of(m) == want) out.push_back(m);
    }
    return out;
}

/// The class of a DAG by brute force over orientations of its skeleton.
inline std::vector<Mat> brute_class_of(const Mat& d) {
    const VsKey want = vs_of(d);
    std::vector<Mat> out;
    const auto skel = skel_of(d);
    for (unsigned mask = 0; mask < (1u << skel.size()); ++mask) {
        Mat m(d.p);
        for (std::size_t k = 0; k < skel.size(); ++k) {
            auto [u, v] = skel[k];
            if (mask >> k & 1) m.a[v][u] = 1;
            else m.a[u][v] = 1;
        }
        if (acyclic(m) && vs_of(m) == want) out.push_back(m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Undirected graphs on bitmasks

/// Chordal iff no vertex subset of size >= 4 induces a cycle.
inline bool brute_chordal(int n, const std::vector<unsigned>& adj) {
    for (unsigned s = 0; s < (1u << n); ++s) {
        if (__builtin_popcount(s) < 4) continue;
        bool all_deg2 = true;
        for (int v = 0; v < n && all_deg2; ++v)
            if (s >> v & 1) all_deg2 = __builtin_popcount(adj[v] & s) == 2;
        if (!all_deg2) continue;
        // connected?
        unsigned seen = 1u << __builtin_ctz(s), frontier = seen;
        while (frontier) {
            unsigned next = 0;
            for (int v = 0; v < n; ++v)
                if (frontier >> v & 1) next |= adj[v] & s;
            frontier = next & ~seen;
            seen |= next;
        }
        if (seen == s) return false;
    }
    return true;
}

} // namespace mctest
