#ifndef MBMML_SYNTH_HPP
#define MBMML_SYNTH_HPP

#include <string>
#include <vector>

#include "mbmml/common.hpp"
#include "mbmml/core.hpp"

namespace mbmml {

struct NetworkSpec {
    int n_vars = 1;
    int max_fanin = 0;
    int max_arity = 2;
    double gen_alpha = 1.0;  // symmetric Dirichlet concentration for CPT rows
    std::uint64_t seed = 0;

    void validate() const {
        if (n_vars < 1) throw DataError("n_vars must be >= 1");
        if (max_fanin < 0) throw DataError("max_fanin must be >= 0");
        if (max_arity < 2) throw DataError("max_arity must be >= 2");
        if (gen_alpha <= 0.0) throw DataError("gen_alpha must be positive");
    }
};

// Uniform total order; per node, parent count uniform in
// [0, min(#predecessors, max_fanin)], parents uniform without replacement
// from the predecessors. Arities uniform in [2, max_arity].
inline Dag random_dag(const NetworkSpec& spec, Rng& rng) {
    spec.validate();
    std::vector<Variable> vars(static_cast<std::size_t>(spec.n_vars));
    for (int i = 0; i < spec.n_vars; ++i) {
        vars[static_cast<std::size_t>(i)].name = "X" + std::to_string(i + 1);
        vars[static_cast<std::size_t>(i)].arity =
            2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_arity - 1)));
    }
    Dag dag(std::move(vars));
    const auto order = rng.permutation(spec.n_vars);
    for (int pos = 1; pos < spec.n_vars; ++pos) {
        const int node = order[static_cast<std::size_t>(pos)];
        const int cap = std::min(pos, spec.max_fanin);
        const auto n_parents = static_cast<int>(rng.below(static_cast<std::uint64_t>(cap) + 1));
        // Partial Fisher-Yates over the predecessors.
        std::vector<int> pred(order.begin(), order.begin() + pos);
        for (int k = 0; k < n_parents; ++k) {
            const auto j = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(pos - k)));
            std::swap(pred[static_cast<std::size_t>(k)], pred[static_cast<std::size_t>(j)]);
            dag.add_edge(pred[static_cast<std::size_t>(k)], node);
        }
    }
    return dag;
}

// Each CPT row drawn independently from symmetric Dirichlet(gen_alpha);
// gen_alpha = 1 is the uniform-simplex case.
inline BayesianNetwork random_parameters(Dag dag, double gen_alpha, Rng& rng) {
    if (gen_alpha <= 0.0) throw DataError("gen_alpha must be positive");
    BayesianNetwork bn;
    bn.dag = std::move(dag);
    bn.cpts.resize(static_cast<std::size_t>(bn.dag.size()));
    for (int i = 0; i < bn.dag.size(); ++i) {
        std::size_t rows = 1;
        for (int p : bn.dag.parents(i)) rows *= static_cast<std::size_t>(bn.dag.variable(p).arity);
        auto& table = bn.cpts[static_cast<std::size_t>(i)];
        table.reserve(rows);
        for (std::size_t r = 0; r < rows; ++r)
            table.push_back(rng.dirichlet(gen_alpha, bn.dag.variable(i).arity));
    }
    bn.validate();
    return bn;
}

inline BayesianNetwork random_network(const NetworkSpec& spec) {
    Rng rng(derive_seed(spec.seed, {0x6e6574ULL}));  // "net" stream
    auto dag = random_dag(spec, rng);
    return random_parameters(std::move(dag), spec.gen_alpha, rng);
}

// Forward sampling in topological order.
inline DiscreteDataset ancestral_sample(const BayesianNetwork& bn, int n_records, Rng& rng) {
    if (n_records < 1) throw DataError("n_records must be >= 1");
    bn.validate();
    const auto order = topological_order(bn.dag);
    DiscreteDataset out;
    out.variables = bn.dag.variables();
    out.records.assign(static_cast<std::size_t>(n_records),
                       std::vector<int>(static_cast<std::size_t>(bn.dag.size()), 0));
    // Parent lists sorted ascending to match CPT row-major row indexing.
    std::vector<std::vector<int>> parents(static_cast<std::size_t>(bn.dag.size()));
    for (int i = 0; i < bn.dag.size(); ++i) {
        parents[static_cast<std::size_t>(i)] = bn.dag.parents(i);
        std::sort(parents[static_cast<std::size_t>(i)].begin(), parents[static_cast<std::size_t>(i)].end());
    }
    for (auto& rec : out.records) {
        for (int v : order) {
            std::size_t row = 0;
            for (int p : parents[static_cast<std::size_t>(v)])
                row = row * static_cast<std::size_t>(bn.dag.variable(p).arity) +
                      static_cast<std::size_t>(rec[static_cast<std::size_t>(p)]);
            const auto& probs = bn.cpts[static_cast<std::size_t>(v)][row];
            const double u = rng.next_double();
            double acc = 0.0;
            int state = static_cast<int>(probs.size()) - 1;
            for (std::size_t k = 0; k < probs.size(); ++k) {
                acc += probs[k];
                if (u < acc) {
                    state = static_cast<int>(k);
                    break;
                }
            }
            rec[static_cast<std::size_t>(v)] = state;
        }
    }
    return out;
}

}  // namespace mbmml

#endif
