#ifndef MBMML_TEST_UTIL_HPP
#define MBMML_TEST_UTIL_HPP

#include <set>
#include <vector>

#include "mbmml/core.hpp"
#include "mbmml/synth.hpp"

namespace testutil {

// Binary chain X1 -> X2 -> X3 with strong coupling: copy with 0.1 noise.
inline mbmml::BayesianNetwork chain3() {
    mbmml::Dag dag({{"X1", 2}, {"X2", 2}, {"X3", 2}});
    dag.add_edge(0, 1);
    dag.add_edge(1, 2);
    mbmml::BayesianNetwork bn;
    bn.dag = std::move(dag);
    bn.cpts = {{{0.5, 0.5}},
               {{0.9, 0.1}, {0.1, 0.9}},
               {{0.9, 0.1}, {0.1, 0.9}}};
    return bn;
}

// Collider X1 -> X3 <- X2, noisy-AND-ish so children depend on each parent
// marginally while the spouses stay dependent given the child.
inline mbmml::BayesianNetwork collider3() {
    mbmml::Dag dag({{"X1", 2}, {"X2", 2}, {"X3", 2}});
    dag.add_edge(0, 2);
    dag.add_edge(1, 2);
    mbmml::BayesianNetwork bn;
    bn.dag = std::move(dag);
    bn.cpts = {{{0.5, 0.5}},
               {{0.5, 0.5}},
               {{0.95, 0.05}, {0.5, 0.5}, {0.5, 0.5}, {0.05, 0.95}}};
    return bn;
}

inline mbmml::DiscreteDataset sample(const mbmml::BayesianNetwork& bn, int n, std::uint64_t seed) {
    mbmml::Rng rng(seed);
    return mbmml::ancestral_sample(bn, n, rng);
}

// All labeled DAGs over the given node ids, by brute force over edge subsets.
inline std::vector<std::vector<std::pair<int, int>>> all_dags(const std::vector<int>& nodes) {
    std::vector<std::pair<int, int>> slots;
    for (int a : nodes)
        for (int b : nodes)
            if (a != b) slots.emplace_back(a, b);
    std::vector<std::vector<std::pair<int, int>>> out;
    const std::size_t n_masks = static_cast<std::size_t>(1) << slots.size();
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        std::vector<std::pair<int, int>> edges;
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (mask & (static_cast<std::size_t>(1) << i)) edges.push_back(slots[i]);
        // cycle check via repeated source elimination
        std::set<int> alive(nodes.begin(), nodes.end());
        auto pending = edges;
        bool progressed = true;
        while (progressed && !alive.empty()) {
            progressed = false;
            for (int v : std::vector<int>(alive.begin(), alive.end())) {
                bool has_parent = false;
                for (const auto& [p, c] : pending)
                    if (c == v && alive.count(p)) has_parent = true;
                if (!has_parent) {
                    alive.erase(v);
                    progressed = true;
                }
            }
        }
        if (alive.empty()) out.push_back(std::move(edges));
    }
    return out;
}

}  // namespace testutil

#endif
