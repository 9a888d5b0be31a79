#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace mecchain;
using mctest::cpdag;

namespace {

double as_size(const CompletedPdag& c) { return static_cast<double>(mec_size(c)); }

} // namespace

TEST(EnumerateDags, Counts) {
    EXPECT_EQ(enumerate_dags(1, 0).size(), 1u);
    EXPECT_EQ(enumerate_dags(2, 1).size(), 3u);
    EXPECT_EQ(enumerate_dags(3, 3).size(), 25u);
    EXPECT_EQ(enumerate_dags(4, 6).size(), 543u);
    for (int p = 2; p <= 5; ++p)
        for (int n = 0; n <= p * (p - 1) / 2; ++n)
            EXPECT_EQ(enumerate_dags(p, n).size(), mctest::all_dags(p, n).size()) << p << " " << n;
}

TEST(EnumerateDags, Guards) {
    EXPECT_THROW(enumerate_dags(7, 3), LimitExceeded);
    EXPECT_THROW(enumerate_dags(6, 3), LimitExceeded);
    EXPECT_THROW(enumerate_mecs(7, 3), LimitExceeded);
}

TEST(EnumerateMecs, Counts) {
    auto c2 = enumerate_mecs(2, 1);
    ASSERT_EQ(c2.size(), 2u);
    EXPECT_EQ(c2.states[0], CompletedPdag::empty(2));
    EXPECT_EQ(c2.sizes, (std::vector<std::uint64_t>{1, 2}));
    EXPECT_EQ(enumerate_mecs(3, 3).size(), 11u);
    EXPECT_EQ(enumerate_mecs(4, 6).size(), 185u);
}

TEST(EnumerateMecs, MatchesBruteForceClasses) {
    for (int p = 2; p <= 5; ++p) {
        const int n_max = p * (p - 1) / 2;
        const auto cat = enumerate_mecs(p, n_max);
        const auto classes = mctest::brute_classes(p);
        ASSERT_EQ(cat.size(), classes.size());
        std::uint64_t total = 0;
        for (const auto& [key, members] : classes) {
            auto idx = cat.index_of(validate_cpdag(mctest::essential_graph(members)).value());
            ASSERT_TRUE(idx.has_value());
            EXPECT_EQ(cat.sizes[*idx], members.size());
            total += members.size();
        }
        EXPECT_EQ(total, mctest::all_dags(p).size());
    }
}

TEST(EnumerateMecs, SizesSumToDagCount) {
    const auto cat = enumerate_mecs(3, 3);
    std::uint64_t s = 0;
    for (auto v : cat.sizes) s += v;
    EXPECT_EQ(s, 25u);
}

TEST(EnumerateMecs, CanonicalOrderAndDistinct) {
    const auto cat = enumerate_mecs(4, 6);
    for (std::size_t i = 1; i < cat.size(); ++i) EXPECT_LT(cat.states[i - 1], cat.states[i]);
}

TEST(MecSize, Examples) {
    EXPECT_EQ(mec_size(cpdag(3, "0->2 1->2")), 1u);
    EXPECT_EQ(mec_size(cpdag(2, "0--1")), 2u);
    EXPECT_EQ(mec_size(cpdag(3, "0--1 1--2 0--2")), 6u);
    EXPECT_EQ(mec_size(CompletedPdag::empty(5)), 1u);
}

TEST(MecSize, ComponentProductMatchesGroupSizes) {
    for (int p = 2; p <= 5; ++p) {
        const auto cat = enumerate_mecs(p, p * (p - 1) / 2);
        for (std::size_t i = 0; i < cat.size(); ++i) ASSERT_EQ(mec_size(cat.states[i]), cat.sizes[i]);
    }
}

TEST(MecSize, LargeComponentsAndCap) {
    // Undirected tree on 10 vertices: one sink choice per root, 10 DAGs.
    Pdag star(10);
    for (int i = 1; i < 10; ++i) star.add_undirected(0, i);
    auto s = validate_cpdag(star).value();
    EXPECT_EQ(mec_size(s), 10u);
    // Complete graph K_8: every topological order, 8!.
    Pdag k(8);
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j) k.add_undirected(i, j);
    EXPECT_EQ(mec_size(validate_cpdag(k).value()), 40320u);
    EXPECT_THROW(mec_size(s, 5), LimitExceeded);
}

TEST(MecSize, ChordalComponentsMatchBruteForceOrientationCount) {
    // Chordal undirected graphs on 6 vertices, one per skeleton pattern.
    const std::vector<std::string> graphs = {
        "0--1 1--2 2--3 3--4 4--5",
        "0--1 0--2 1--2 2--3 3--4 2--4 4--5",
        "0--1 0--2 0--3 1--2 1--3 2--3 3--4 3--5 4--5",
        "0--1 1--2 2--0 2--3 3--4 4--2 4--5 5--0 0--4"};
    for (const auto& spec : graphs) {
        auto g = mctest::pdag(6, spec);
        auto c = validate_cpdag(g);
        ASSERT_TRUE(c.ok()) << spec;
        std::uint64_t brute = mctest::brute_extensions(g).size();
        EXPECT_EQ(mec_size(c.value()), brute) << spec;
    }
}

TEST(TrueDistribution, Examples) {
    const auto d3 = true_distribution(enumerate_mecs(3, 3), as_size);
    ASSERT_EQ(d3.size(), 4u);
    EXPECT_DOUBLE_EQ(d3.at(1), 4.0 / 11);
    EXPECT_DOUBLE_EQ(d3.at(2), 3.0 / 11);
    EXPECT_DOUBLE_EQ(d3.at(3), 3.0 / 11);
    EXPECT_DOUBLE_EQ(d3.at(6), 1.0 / 11);
    const auto constant = true_distribution(enumerate_mecs(3, 3), [](const CompletedPdag&) { return 7.0; });
    ASSERT_EQ(constant.size(), 1u);
    EXPECT_DOUBLE_EQ(constant.at(7), 1.0);
}

TEST(TrueDistribution, FourVerticesMatchReferenceValues) {
    const auto d = true_distribution(enumerate_mecs(4, 6), as_size);
    const std::map<double, double> table{{1, 0.31892}, {2, 0.25946}, {3, 0.19460}, {4, 0.10270},
                                          {6, 0.02162}, {8, 0.06486}, {10, 0.03243}, {24, 0.00540}};
    ASSERT_EQ(d.size(), table.size());
    for (const auto& [size, pr] : table) EXPECT_NEAR(d.at(size), pr, 1e-5) << size;
}

TEST(VerifyPerfect, AllSmallSpaces) {
    for (int p = 2; p <= 4; ++p)
        for (int n = 1; n <= p * (p - 1) / 2; ++n) {
            const auto rep = verify_perfect(enumerate_mecs(p, n));
            EXPECT_TRUE(rep.passed()) << "p=" << p << " n=" << n << " "
                                      << (rep.counterexamples.empty() ? "" : rep.counterexamples[0]);
        }
}

TEST(VerifyPerfect, DroppingCommonChildConditionBreaksReversibility) {
    bool found = false;
    for (int p = 3; p <= 4 && !found; ++p)
        for (int n = 1; n <= p * (p - 1) / 2 && !found; ++n) {
            const auto rep = verify_perfect(enumerate_mecs(p, n, ConditionToggles{false, true, true}));
            if (!rep.reversibility) {
                found = true;
                ASSERT_FALSE(rep.counterexamples.empty());
                EXPECT_NE(rep.counterexamples[0].find("reversibility"), std::string::npos);
            }
        }
    EXPECT_TRUE(found);
}

TEST(VerifyPerfect, CorruptedSuccessorIsCaught) {
    auto cat = enumerate_mecs(3, 3);
    // Point one transition at the wrong state.
    for (std::size_t i = 0; i < cat.size(); ++i)
        if (!cat.successors[i].empty()) {
            cat.successors[i][0] = (cat.successors[i][0] + 1) % static_cast<int>(cat.size());
            break;
        }
    EXPECT_FALSE(verify_perfect(cat).passed());
}

TEST(DetailedBalance, TwoStates) {
    const auto cat = enumerate_mecs(2, 1);
    const auto rep = verify_detailed_balance(cat);
    EXPECT_TRUE(rep.passed());
    const auto pi = stationary_weights(cat);
    ASSERT_EQ(pi.size(), 2u);
    EXPECT_DOUBLE_EQ(pi[0], 0.5);
    EXPECT_DOUBLE_EQ(pi[1], 0.5);
}

TEST(DetailedBalance, AllSmallSpaces) {
    for (int p = 2; p <= 4; ++p)
        for (int n = 1; n <= p * (p - 1) / 2; ++n) {
            const auto rep = verify_detailed_balance(enumerate_mecs(p, n));
            EXPECT_TRUE(rep.detailed_balance) << p << " " << n;
            EXPECT_TRUE(rep.global_balance) << p << " " << n;
            EXPECT_LE(rep.max_global_residual, 1e-12);
        }
}

TEST(DetailedBalance, FailsWhenTransitionsAreLopsided) {
    auto cat = enumerate_mecs(3, 3);
    // Drop one operator without its reverse.
    for (std::size_t i = 0; i < cat.size(); ++i)
        if (cat.operator_sets[i].size() > 1) {
            cat.operator_sets[i].ops.pop_back();
            cat.operator_sets[i].results.pop_back();
            cat.successors[i].pop_back();
            break;
        }
    EXPECT_FALSE(verify_detailed_balance(cat).detailed_balance);
}

TEST(Rational, Arithmetic) {
    EXPECT_EQ(Rational(2, 4), Rational(1, 2));
    EXPECT_EQ(Rational(1, -3), Rational(-1, 3));
    EXPECT_EQ(Rational(3, 7) * Rational(7, 9), Rational(1, 3));
    EXPECT_THROW(Rational(1, 0), std::domain_error);
}
