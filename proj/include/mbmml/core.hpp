#ifndef MBMML_CORE_HPP
#define MBMML_CORE_HPP

#include <algorithm>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mbmml/common.hpp"

namespace mbmml {

struct Variable {
    std::string name;
    int arity = 2;  // r_i >= 2
};

class Dag {
public:
    Dag() = default;
    explicit Dag(std::vector<Variable> vars) : vars_(std::move(vars)) {
        std::set<std::string> seen;
        for (const auto& v : vars_) {
            if (v.arity < 2) throw DataError("variable '" + v.name + "' has arity < 2");
            if (!seen.insert(v.name).second)
                throw DataError("duplicate variable name '" + v.name + "'");
        }
    }

    int size() const { return static_cast<int>(vars_.size()); }
    const std::vector<Variable>& variables() const { return vars_; }
    const Variable& variable(int i) const { return vars_.at(static_cast<std::size_t>(i)); }
    const std::set<std::pair<int, int>>& edges() const { return edges_; }

    void add_edge(int parent, int child) {
        check_index(parent);
        check_index(child);
        if (parent == child) throw StructureError("self-loop on variable index " + std::to_string(parent));
        if (!edges_.insert({parent, child}).second)
            throw StructureError("duplicate edge " + std::to_string(parent) + "->" + std::to_string(child));
    }

    std::vector<int> parents(int i) const {
        check_index(i);
        std::vector<int> out;
        for (const auto& [p, c] : edges_)
            if (c == i) out.push_back(p);
        return out;
    }

    std::vector<int> children(int i) const {
        check_index(i);
        std::vector<int> out;
        for (const auto& [p, c] : edges_)
            if (p == i) out.push_back(c);
        return out;
    }

    int index_of(const std::string& name) const {
        for (int i = 0; i < size(); ++i)
            if (vars_[static_cast<std::size_t>(i)].name == name) return i;
        throw DataError("unknown variable '" + name + "'");
    }

    void check_index(int i) const {
        if (i < 0 || i >= size())
            throw StructureError("variable index " + std::to_string(i) + " out of range");
    }

private:
    std::vector<Variable> vars_;
    std::set<std::pair<int, int>> edges_;
};

// Kahn's algorithm, lowest index first among available nodes. Throws on a
// cycle, naming one edge that participates in it.
inline std::vector<int> topological_order(const Dag& dag) {
    const int n = dag.size();
    std::vector<int> indeg(static_cast<std::size_t>(n), 0);
    for (const auto& [p, c] : dag.edges()) {
        (void)p;
        ++indeg[static_cast<std::size_t>(c)];
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int i = 0; i < n; ++i)
        if (indeg[static_cast<std::size_t>(i)] == 0) ready.push(i);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int c : dag.children(v))
            if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push(c);
    }
    if (static_cast<int>(order.size()) != n) {
        for (const auto& [p, c] : dag.edges())
            if (indeg[static_cast<std::size_t>(c)] > 0)
                throw StructureError("cycle detected through edge " + std::to_string(p) + "->" +
                                     std::to_string(c));
        throw StructureError("cycle detected");
    }
    return order;
}

struct MarkovBlanket {
    int target = -1;
    std::set<int> members;

    bool operator==(const MarkovBlanket&) const = default;
};

// Parents, children and spouses (co-parents of children), target excluded.
inline MarkovBlanket markov_blanket_of(const Dag& dag, int target) {
    dag.check_index(target);
    MarkovBlanket mb;
    mb.target = target;
    for (int p : dag.parents(target)) mb.members.insert(p);
    for (int c : dag.children(target)) {
        mb.members.insert(c);
        for (int s : dag.parents(c))
            if (s != target) mb.members.insert(s);
    }
    mb.members.erase(target);
    return mb;
}

struct BayesianNetwork {
    Dag dag;
    // cpts[i]: rows indexed by the joint parent state (row-major over parents
    // sorted by ascending variable index), columns by target state.
    std::vector<std::vector<std::vector<double>>> cpts;

    void validate() const {
        if (static_cast<int>(cpts.size()) != dag.size())
            throw DataError("CPT count does not match variable count");
        for (int i = 0; i < dag.size(); ++i) {
            std::size_t expected_rows = 1;
            for (int p : dag.parents(i))
                expected_rows *= static_cast<std::size_t>(dag.variable(p).arity);
            const auto& table = cpts[static_cast<std::size_t>(i)];
            if (table.size() != expected_rows)
                throw DataError("CPT for '" + dag.variable(i).name + "' has wrong row count");
            for (const auto& row : table) {
                if (static_cast<int>(row.size()) != dag.variable(i).arity)
                    throw DataError("CPT row width mismatch for '" + dag.variable(i).name + "'");
                double sum = 0.0;
                for (double v : row) {
                    if (v < 0.0) throw DataError("negative CPT entry for '" + dag.variable(i).name + "'");
                    sum += v;
                }
                if (std::abs(sum - 1.0) > 1e-9)
                    throw DataError("CPT row for '" + dag.variable(i).name + "' does not sum to 1");
            }
        }
    }
};

struct DiscreteDataset {
    std::vector<Variable> variables;
    std::vector<std::vector<int>> records;  // N rows of 0-based state indices

    int n_vars() const { return static_cast<int>(variables.size()); }
    int n_records() const { return static_cast<int>(records.size()); }

    void validate() const {
        for (const auto& v : variables)
            if (v.arity < 2) throw DataError("variable '" + v.name + "' has arity < 2");
        for (const auto& row : records) {
            if (static_cast<int>(row.size()) != n_vars()) throw DataError("record width mismatch");
            for (int j = 0; j < n_vars(); ++j) {
                const int v = row[static_cast<std::size_t>(j)];
                if (v < 0 || v >= variables[static_cast<std::size_t>(j)].arity)
                    throw DataError("state value out of range in column '" +
                                    variables[static_cast<std::size_t>(j)].name + "'");
            }
        }
    }

    int index_of(const std::string& name) const {
        for (int i = 0; i < n_vars(); ++i)
            if (variables[static_cast<std::size_t>(i)].name == name) return i;
        throw DataError("unknown variable '" + name + "'");
    }
};

struct ContingencyTable {
    int target_arity = 0;
    std::vector<int> conditioning_arities;
    // counts[j][k]: conditioning cell j (row-major over conditioning variables
    // in ascending index order), target state k.
    std::vector<std::vector<long long>> counts;
    std::vector<long long> row_totals;

    int n_cells() const { return static_cast<int>(counts.size()); }
};

// Canonical CSV bytes: header row of names, then integer state indices.
inline std::string dataset_csv(const DiscreteDataset& dataset) {
    std::string out;
    for (int j = 0; j < dataset.n_vars(); ++j) {
        if (j > 0) out += ',';
        out += dataset.variables[static_cast<std::size_t>(j)].name;
    }
    out += '\n';
    for (const auto& row : dataset.records) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j > 0) out += ',';
            out += std::to_string(row[j]);
        }
        out += '\n';
    }
    return out;
}

inline ContingencyTable build_contingency(const DiscreteDataset& dataset, int target,
                                          const std::vector<int>& conditioning) {
    if (dataset.n_records() == 0) throw DataError("empty dataset");
    if (target < 0 || target >= dataset.n_vars()) throw StructureError("target index out of range");
    std::vector<int> cond = conditioning;
    std::sort(cond.begin(), cond.end());
    if (std::adjacent_find(cond.begin(), cond.end()) != cond.end())
        throw StructureError("duplicate conditioning variable");
    for (int c : cond) {
        if (c < 0 || c >= dataset.n_vars()) throw StructureError("conditioning index out of range");
        if (c == target) throw StructureError("target overlaps conditioning set");
    }

    ContingencyTable t;
    t.target_arity = dataset.variables[static_cast<std::size_t>(target)].arity;
    std::size_t n_cells = 1;
    for (int c : cond) {
        const int r = dataset.variables[static_cast<std::size_t>(c)].arity;
        t.conditioning_arities.push_back(r);
        n_cells *= static_cast<std::size_t>(r);
    }
    t.counts.assign(n_cells, std::vector<long long>(static_cast<std::size_t>(t.target_arity), 0));
    t.row_totals.assign(n_cells, 0);
    for (const auto& row : dataset.records) {
        std::size_t cell = 0;
        for (std::size_t i = 0; i < cond.size(); ++i)
            cell = cell * static_cast<std::size_t>(t.conditioning_arities[i]) +
                   static_cast<std::size_t>(row[static_cast<std::size_t>(cond[i])]);
        ++t.counts[cell][static_cast<std::size_t>(row[static_cast<std::size_t>(target)])];
        ++t.row_totals[cell];
    }
    return t;
}

}  // namespace mbmml

#endif
