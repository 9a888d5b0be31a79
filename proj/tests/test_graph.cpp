#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace mecchain;
using mctest::pdag;

namespace {

VertexSet vs(std::initializer_list<int> l) { return VertexSet(l); }

} // namespace

TEST(Pdag, EdgeBookkeeping) {
    Pdag g(4);
    g.add_directed(0, 1);
    g.add_undirected(2, 1);
    EXPECT_EQ(g.num_edges(), 2u);
    EXPECT_EQ(g.num_directed(), 1u);
    EXPECT_TRUE(g.has_directed(0, 1));
    EXPECT_FALSE(g.has_directed(1, 0));
    EXPECT_TRUE(g.has_undirected(1, 2));
    EXPECT_TRUE(g.adjacent(2, 1));
    EXPECT_FALSE(g.adjacent(0, 3));
    EXPECT_THROW(g.add_directed(1, 0), std::invalid_argument);
    EXPECT_THROW(g.add_undirected(3, 3), std::invalid_argument);
    EXPECT_THROW(g.add_directed(0, 4), std::out_of_range);
    g.orient(2, 1);
    EXPECT_TRUE(g.has_directed(2, 1));
    g.undirect(0, 1);
    EXPECT_TRUE(g.has_undirected(0, 1));
    g.remove_edge(1, 0);
    EXPECT_EQ(g.num_edges(), 1u);
}

TEST(Pdag, CanonicalEdgesAndOrdering) {
    auto a = pdag(3, "2--0 1->2");
    auto b = pdag(3, "1->2 0--2");
    EXPECT_EQ(a, b);
    EXPECT_EQ(to_string(a), to_string(b));
    EXPECT_FALSE(a < b || b < a);
    EXPECT_LT(pdag(3, ""), a);
}

TEST(LocalSets, Neighbors) {
    EXPECT_EQ(neighbors(pdag(3, "0--1 0->2"), 0), vs({1}));
    EXPECT_EQ(neighbors(pdag(3, ""), 1), vs({}));
    EXPECT_EQ(neighbors(pdag(3, "0--1 1--2"), 1), vs({0, 2}));
}

TEST(LocalSets, Parents) {
    EXPECT_EQ(parents(pdag(3, "0->2 1->2"), 2), vs({0, 1}));
    EXPECT_EQ(parents(pdag(3, "0--2"), 2), vs({}));
    EXPECT_EQ(parents(pdag(3, "0->1 1->2"), 1), vs({0}));
}

TEST(LocalSets, CommonNeighbors) {
    // x=0, y=1, z=2, w=3
    EXPECT_EQ(common_neighbors(pdag(3, "0--2 1--2"), 0, 1), vs({2}));
    EXPECT_EQ(common_neighbors(pdag(3, "0->2 1--2"), 0, 1), vs({}));
    EXPECT_EQ(common_neighbors(pdag(4, "0--2 1--2 0--3 1--3"), 0, 1), vs({2, 3}));
}

TEST(LocalSets, Omega) {
    // v=2, x=0, y=1
    EXPECT_EQ(omega(pdag(3, "2->0 2--1"), 0, 1), vs({2}));
    EXPECT_EQ(omega(pdag(3, ""), 0, 1), vs({}));
    EXPECT_EQ(omega(pdag(3, "2->0 2->1"), 0, 1), vs({}));
}

TEST(LocalSets, IsClique) {
    auto tri = pdag(4, "0--1 1->2 0--2");
    EXPECT_TRUE(is_clique(tri, {}));
    EXPECT_TRUE(is_clique(tri, {0, 1, 2}));
    EXPECT_FALSE(is_clique(tri, {0, 3}));
    EXPECT_TRUE(is_clique(tri, {3}));
}

TEST(WholeGraph, Skeleton) {
    EXPECT_EQ(skeleton(pdag(2, "0->1")), pdag(2, "0--1"));
    EXPECT_EQ(skeleton(pdag(3, "")), pdag(3, ""));
    auto s = skeleton(pdag(3, "0->1 1--2"));
    EXPECT_EQ(s, pdag(3, "0--1 1--2"));
    EXPECT_EQ(s.num_edges(), 2u);
}

TEST(WholeGraph, VStructures) {
    auto v = v_structures(pdag(3, "0->2 1->2"));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0], (VStructure{0, 2, 1}));
    EXPECT_TRUE(v_structures(pdag(3, "0->2 1->2 0--1")).empty());
    // K_{2,2} with parts {0,1} -> {2,3}
    auto k = v_structures(pdag(4, "0->2 0->3 1->2 1->3"));
    ASSERT_EQ(k.size(), 2u);
    EXPECT_EQ(k[0], (VStructure{0, 2, 1}));
    EXPECT_EQ(k[1], (VStructure{0, 3, 1}));
}

TEST(WholeGraph, UndirectedVStructures) {
    auto u = undirected_v_structures(pdag(3, "0--1 1--2"));
    ASSERT_EQ(u.size(), 1u);
    EXPECT_EQ(u[0], (VStructure{0, 1, 2}));
    EXPECT_TRUE(undirected_v_structures(pdag(3, "0--1 1--2 0--2")).empty());
    EXPECT_EQ(undirected_v_structures(pdag(4, "3--0 3--1 3--2")).size(), 3u);
}

TEST(WholeGraph, ChainComponents) {
    EXPECT_TRUE(chain_components(pdag(3, "0->2 1->2")).empty());
    auto c = chain_components(pdag(4, "0--1 2->3"));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].vertices, vs({0, 1}));
    auto t = chain_components(pdag(4, "0--1 1--2 0--2"));
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].vertices.size(), 3u);
    EXPECT_EQ(t[0].edges.size(), 3u);
    EXPECT_EQ(chain_components(pdag(4, "0--1 1--2 0--2"), true).size(), 2u);
}

TEST(WholeGraph, ChainComponentsPartitionUndirectedVertices) {
    std::mt19937 gen(5);
    for (int trial = 0; trial < 300; ++trial) {
        Pdag g(7);
        for (int u = 0; u < 7; ++u)
            for (int v = u + 1; v < 7; ++v) {
                int r = gen() % 4;
                if (r == 1) g.add_undirected(u, v);
                if (r == 2) g.add_directed(u, v);
            }
        std::vector<int> hits(7, 0);
        for (const auto& comp : chain_components(g))
            for (Vertex v : comp.vertices) ++hits[v];
        for (int v = 0; v < 7; ++v) EXPECT_EQ(hits[v], g.neighbors(v).empty() ? 0 : 1);
    }
}

TEST(Predicates, Chordal) {
    EXPECT_FALSE(is_chordal(pdag(4, "0--1 1--2 2--3 3--0")));
    EXPECT_TRUE(is_chordal(pdag(4, "0--1 1--2 2--3 3--0 0--2")));
    EXPECT_TRUE(is_chordal(pdag(6, "0--1 0--2 1--3 1--4 2--5")));
}

namespace {

void check_all_graphs(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    for (unsigned mask = 0; mask < (1u << pairs.size()); ++mask) {
        Pdag g(n);
        std::vector<unsigned> adj(n, 0);
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (mask >> k & 1) {
                auto [u, v] = pairs[k];
                g.add_undirected(u, v);
                adj[u] |= 1u << v;
                adj[v] |= 1u << u;
            }
        ASSERT_EQ(is_chordal(g), mctest::brute_chordal(n, adj)) << to_string(g);
    }
}

} // namespace

TEST(Predicates, ChordalMatchesInducedCycleSearchUpToSixVertices) {
    for (int n = 1; n <= 6; ++n) check_all_graphs(n);
}

TEST(Predicates, ChordalMatchesInducedCycleSearchSevenVerticesSampled) {
    std::mt19937 gen(11);
    for (int trial = 0; trial < 20000; ++trial) {
        Pdag g(7);
        std::vector<unsigned> adj(7, 0);
        const unsigned density = gen() % 100;
        for (int u = 0; u < 7; ++u)
            for (int v = u + 1; v < 7; ++v)
                if (gen() % 100 < density) {
                    g.add_undirected(u, v);
                    adj[u] |= 1u << v;
                    adj[v] |= 1u << u;
                }
        ASSERT_EQ(is_chordal(g), mctest::brute_chordal(7, adj)) << to_string(g);
    }
}

TEST(Predicates, ChainGraph) {
    EXPECT_FALSE(is_chain_graph(pdag(3, "0->1 1--2 2--0")));
    EXPECT_TRUE(is_chain_graph(pdag(3, "0->1 2->1")));
    EXPECT_TRUE(is_chain_graph(pdag(3, "0--1 1--2 2--0")));
    EXPECT_FALSE(is_chain_graph(pdag(3, "0->1 1->2 2->0")));
}

TEST(Predicates, ChainGraphImpliesNoDirectedCycle) {
    std::mt19937 gen(3);
    for (int trial = 0; trial < 2000; ++trial) {
        Pdag g(5);
        for (int u = 0; u < 5; ++u)
            for (int v = u + 1; v < 5; ++v) {
                int r = gen() % 4;
                if (r == 1) g.add_undirected(u, v);
                if (r == 2) g.add_directed(u, v);
                if (r == 3) g.add_directed(v, u);
            }
        if (is_chain_graph(g)) EXPECT_TRUE(is_pdag(g)) << to_string(g);
    }
}

TEST(Predicates, StronglyProtected) {
    // w=2, v=0, u=1
    EXPECT_TRUE(is_strongly_protected(pdag(3, "2->0 0->1"), 0, 1));
    EXPECT_FALSE(is_strongly_protected(pdag(3, "0->1"), 0, 1));
    EXPECT_TRUE(is_strongly_protected(pdag(3, "0->1 2->1"), 0, 1));
    EXPECT_TRUE(is_strongly_protected(pdag(3, "0->2 2->1 0->1"), 0, 1));
    EXPECT_TRUE(is_strongly_protected(pdag(4, "0--2 0--3 2->1 3->1 0->1"), 0, 1));
    EXPECT_FALSE(is_strongly_protected(pdag(4, "0--2 0--3 2->1 3->1 0->1 2--3"), 0, 1));
    EXPECT_THROW(is_strongly_protected(pdag(3, "0--1"), 0, 1), std::invalid_argument);
    EXPECT_THROW(is_strongly_protected(pdag(3, ""), 0, 1), std::invalid_argument);
}

TEST(Predicates, ValidateCpdag) {
    EXPECT_TRUE(validate_cpdag(pdag(2, "0--1")).ok());
    auto lone = validate_cpdag(pdag(2, "0->1"));
    ASSERT_FALSE(lone.ok());
    EXPECT_EQ(lone.error().condition, 4);
    auto induced = validate_cpdag(pdag(3, "0->1 1--2"));
    ASSERT_FALSE(induced.ok());
    EXPECT_EQ(induced.error().condition, 3);
    auto cycle = validate_cpdag(pdag(3, "0->1 1--2 2--0"));
    ASSERT_FALSE(cycle.ok());
    EXPECT_EQ(cycle.error().condition, 1);
    auto square = validate_cpdag(pdag(4, "0--1 1--2 2--3 3--0"));
    ASSERT_FALSE(square.ok());
    EXPECT_EQ(square.error().condition, 2);
    EXPECT_FALSE(square.error().witness.empty());
}

TEST(Paths, UndirectedAvoiding) {
    // a=0, m=2, b=1, n=3
    EXPECT_FALSE(has_undirected_path_avoiding(pdag(3, "0--2 2--1"), 0, 1, {2}));
    EXPECT_TRUE(has_undirected_path_avoiding(pdag(2, "0--1"), 0, 1, {}));
    EXPECT_TRUE(has_undirected_path_avoiding(pdag(4, "0--2 2--1 0--3 3--1"), 0, 1, {2}));
    EXPECT_FALSE(has_undirected_path_avoiding(pdag(3, "0->2 2--1"), 0, 1, {}));
}

TEST(Paths, PartiallyDirectedAvoiding) {
    EXPECT_TRUE(has_partially_directed_path_avoiding(pdag(3, "0->2 2--1"), 0, 1, {}));
    EXPECT_FALSE(has_partially_directed_path_avoiding(pdag(3, "2->0 2--1"), 0, 1, {}));
    EXPECT_FALSE(has_partially_directed_path_avoiding(pdag(3, "0->2 2->1"), 0, 1, {2}));
    EXPECT_TRUE(has_partially_directed_path_avoiding(pdag(3, "0->2 2->1"), 0, 1, {}));
}
