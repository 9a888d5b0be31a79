#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "mecchain/operators.hpp"

namespace mecchain {

/// Every completed PDAG on p vertices with at most n_max edges, in canonical
/// order, with class sizes, operator sets and the transition structure.
struct StateSpaceCatalog {
    int p = 0;
    int n_max = 0;
    ConditionToggles conditions;
    std::vector<CompletedPdag> states;
    std::vector<std::uint64_t> sizes;
    std::vector<OperatorSet> operator_sets;
    /// successors[i][k]: index of the state reached by operator_sets[i].ops[k],
    /// or -1 when the result is not a catalog state.
    std::vector<std::vector<int>> successors;

    std::size_t size() const { return states.size(); }

    std::optional<int> index_of(const CompletedPdag& c) const {
        auto it = std::lower_bound(states.begin(), states.end(), c);
        if (it == states.end() || !(*it == c)) return std::nullopt;
        return static_cast<int>(it - states.begin());
    }
};

/// Fills operator_sets and successors for already-sorted states.
inline void build_transitions(StateSpaceCatalog& cat) {
    cat.operator_sets.clear();
    cat.successors.clear();
    for (const auto& s : cat.states) {
        auto set = enumerate_operator_set(s, cat.n_max, cat.conditions);
        std::vector<int> succ;
        for (std::size_t k = 0; k < set.size(); ++k) {
            auto idx = cat.index_of(set.result(k));
            succ.push_back(idx ? *idx : -1);
        }
        cat.operator_sets.push_back(std::move(set));
        cat.successors.push_back(std::move(succ));
    }
}

} // namespace mecchain
