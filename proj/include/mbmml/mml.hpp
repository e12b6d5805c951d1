#ifndef MBMML_MML_HPP
#define MBMML_MML_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "mbmml/common.hpp"
#include "mbmml/core.hpp"
#include "mbmml/polytree.hpp"

namespace mbmml {

// Half of ln(pi*e/6) per free parameter, the CPT parameter-precision cost.
inline double ln_pi_e_over_6() { return std::log(M_PI * M_E / 6.0); }

struct DirichletPrior {
    double alpha = 1.0;                         // symmetric shorthand
    std::optional<std::vector<double>> alphas;  // explicit per-state vector for the target

    // Concentration vector for a variable of arity r. The explicit vector, if
    // any, applies only to the scored target; conditional terms for other
    // variables always use the symmetric value.
    std::vector<double> resolve(int r) const {
        if (alphas) {
            if (static_cast<int>(alphas->size()) != r)
                throw DataError("Dirichlet prior arity mismatch");
            for (double a : *alphas)
                if (a <= 0.0) throw DataError("non-positive Dirichlet concentration");
            return *alphas;
        }
        if (alpha <= 0.0) throw DataError("non-positive Dirichlet concentration");
        return std::vector<double>(static_cast<std::size_t>(r), alpha);
    }
};

struct MessageLength {
    double nits = 0.0;
};

namespace detail {

inline double check_length(double nits) {
    if (!std::isfinite(nits)) throw StructureError("non-finite message length");
    if (nits < 0.0) {
        if (nits < -1e-9) throw StructureError("negative message length");
        nits = 0.0;
    }
    return nits;
}

// ln[ Gamma(N+a0) * prod Gamma(a_k) / (Gamma(a0) * prod Gamma(n_k+a_k)) ].
inline double multistate_nits(const std::vector<long long>& counts, const std::vector<double>& a) {
    double a0 = 0.0;
    long long total = 0;
    double len = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] < 0) throw DataError("negative count");
        a0 += a[k];
        total += counts[k];
        len += std::lgamma(a[k]) - std::lgamma(static_cast<double>(counts[k]) + a[k]);
    }
    len += std::lgamma(static_cast<double>(total) + a0) - std::lgamma(a0);
    return len;
}

}  // namespace detail

// Factorial multi-state MML generalized to a Dirichlet prior, via log-gamma.
// With all alpha_k = 1 this is ln[(N+r-1)! / ((r-1)! * prod n_k!)] exactly.
inline MessageLength multistate_mml(const std::vector<long long>& counts,
                                    const DirichletPrior& prior) {
    const int r = static_cast<int>(counts.size());
    if (r < 2) throw DataError("multistate_mml: arity must be >= 2");
    const auto a = prior.resolve(r);
    return {detail::check_length(detail::multistate_nits(counts, a))};
}

namespace detail {

// Sum of per-cell multi-state lengths for `var` given `conditioning`; the
// adaptive-code conditional length, i.e. the CPT score without its
// parameter-precision term. Explicit prior vectors are used only when the
// coded variable is the scored target.
inline double adaptive_conditional_nits(const DiscreteDataset& dataset, int var,
                                        const std::vector<int>& conditioning,
                                        const DirichletPrior& prior, bool var_is_target) {
    const auto table = build_contingency(dataset, var, conditioning);
    DirichletPrior local = prior;
    if (!var_is_target) local.alphas.reset();
    const auto a = local.resolve(table.target_arity);
    double len = 0.0;
    for (const auto& row : table.counts) len += multistate_nits(row, a);
    return len;
}

}  // namespace detail

// CPT message length: per-parent-cell multi-state MML plus the precision cost
// r_s (r_i - 1) / 2 * ln(pi e / 6).
inline MessageLength cpt_mml(const DiscreteDataset& dataset, int target,
                             const std::vector<int>& parent_set, const DirichletPrior& prior) {
    const auto table = build_contingency(dataset, target, parent_set);
    const auto a = prior.resolve(table.target_arity);
    double len = 0.0;
    for (const auto& row : table.counts) len += detail::multistate_nits(row, a);
    len += 0.5 * static_cast<double>(table.n_cells()) *
           static_cast<double>(table.target_arity - 1) * ln_pi_e_over_6();
    return {detail::check_length(len)};
}

namespace detail {

// Dirichlet-posterior-mean estimates (n + alpha) / (total + alpha0) of
// p(var | conditioning) from full-dataset counts. This is the one estimator
// behind the NB/MBP normalizer terms; swap here to change the convention.
struct PosteriorTable {
    std::vector<int> conditioning;  // ascending
    std::vector<int> cond_arities;
    std::vector<std::vector<double>> p;  // [cell][state]

    std::size_t cell_of(const std::vector<int>& record, int substitute_var, int substitute_value) const {
        std::size_t cell = 0;
        for (std::size_t i = 0; i < conditioning.size(); ++i) {
            const int v = conditioning[i] == substitute_var
                              ? substitute_value
                              : record[static_cast<std::size_t>(conditioning[i])];
            cell = cell * static_cast<std::size_t>(cond_arities[i]) + static_cast<std::size_t>(v);
        }
        return cell;
    }
};

inline PosteriorTable posterior_mean_table(const DiscreteDataset& dataset, int var,
                                           std::vector<int> conditioning,
                                           const DirichletPrior& prior, bool var_is_target) {
    std::sort(conditioning.begin(), conditioning.end());
    const auto table = build_contingency(dataset, var, conditioning);
    DirichletPrior local = prior;
    if (!var_is_target) local.alphas.reset();
    const auto a = local.resolve(table.target_arity);
    double a0 = 0.0;
    for (double x : a) a0 += x;
    PosteriorTable out;
    out.conditioning = std::move(conditioning);
    out.cond_arities = table.conditioning_arities;
    out.p.resize(table.counts.size());
    for (std::size_t j = 0; j < table.counts.size(); ++j) {
        out.p[j].resize(static_cast<std::size_t>(table.target_arity));
        for (int k = 0; k < table.target_arity; ++k)
            out.p[j][static_cast<std::size_t>(k)] =
                (static_cast<double>(table.counts[j][static_cast<std::size_t>(k)]) + a[static_cast<std::size_t>(k)]) /
                (static_cast<double>(table.row_totals[j]) + a0);
    }
    return out;
}

}  // namespace detail

// Naive Bayes message length: adaptive code for the target's marginal, an
// adaptive conditional code for each child given the target, and the
// per-record normalizer ln sum_x p(x) prod_j p(x_j | x) under posterior-mean
// estimates.
inline MessageLength nb_mml(const DiscreteDataset& dataset, int target,
                            const std::vector<int>& child_set, const DirichletPrior& prior) {
    if (dataset.n_records() == 0) throw DataError("empty dataset");
    for (int c : child_set)
        if (c == target) throw StructureError("target inside child set");

    const auto marginal = build_contingency(dataset, target, {});
    const auto a = prior.resolve(marginal.target_arity);
    double len = detail::multistate_nits(marginal.counts[0], a);
    for (int c : child_set)
        len += detail::adaptive_conditional_nits(dataset, c, {target}, prior, false);

    if (!child_set.empty()) {
        const auto pt = detail::posterior_mean_table(dataset, target, {}, prior, true);
        std::vector<detail::PosteriorTable> pc;
        pc.reserve(child_set.size());
        for (int c : child_set)
            pc.push_back(detail::posterior_mean_table(dataset, c, {target}, prior, false));
        const int r = marginal.target_arity;
        for (const auto& rec : dataset.records) {
            double s = 0.0;
            for (int x = 0; x < r; ++x) {
                double term = pt.p[0][static_cast<std::size_t>(x)];
                for (std::size_t j = 0; j < child_set.size(); ++j) {
                    const auto cell = pc[j].cell_of(rec, target, x);
                    term *= pc[j].p[cell][static_cast<std::size_t>(rec[static_cast<std::size_t>(child_set[j])])];
                }
                s += term;
            }
            len += std::log(s);
        }
    }
    return {detail::check_length(len)};
}

// Message length of one MBP plus the per-record conditional probability of the
// target given the rest, which the ensemble average needs separately.
struct MbpScore {
    double total_nits = 0.0;
    std::vector<double> record_cond_prob;
};

inline MbpScore mbp_score_detail(const DiscreteDataset& dataset, int target, const MbPolytree& tree,
                                 const DirichletPrior& prior) {
    if (dataset.n_records() == 0) throw DataError("empty dataset");
    std::set<int> mb;
    for (int v : tree.nodes)
        if (v != target) mb.insert(v);
    if (!is_valid_mbp(tree, target, mb)) throw StructureError("invalid Markov Blanket polytree");

    MbpScore out;
    const std::vector<int> members(mb.begin(), mb.end());
    const auto target_parents = tree.parents_of(target);
    out.total_nits += detail::adaptive_conditional_nits(dataset, target, target_parents, prior, true);
    std::vector<std::vector<int>> member_parents;
    member_parents.reserve(members.size());
    for (std::size_t j = 0; j < members.size(); ++j) {
        member_parents.push_back(tree.parents_of(members[j]));
        out.total_nits +=
            detail::adaptive_conditional_nits(dataset, members[j], member_parents[j], prior, false);
    }

    const auto pt = detail::posterior_mean_table(dataset, target, target_parents, prior, true);
    std::vector<detail::PosteriorTable> pm;
    pm.reserve(members.size());
    for (std::size_t j = 0; j < members.size(); ++j)
        pm.push_back(detail::posterior_mean_table(dataset, members[j], member_parents[j], prior, false));

    const int r = dataset.variables[static_cast<std::size_t>(target)].arity;
    out.record_cond_prob.reserve(dataset.records.size());
    for (const auto& rec : dataset.records) {
        double denom = 0.0;
        double num = 0.0;
        const int observed = rec[static_cast<std::size_t>(target)];
        for (int x = 0; x < r; ++x) {
            double term = pt.p[pt.cell_of(rec, target, x)][static_cast<std::size_t>(x)];
            for (std::size_t j = 0; j < members.size(); ++j) {
                const auto cell = pm[j].cell_of(rec, target, x);
                term *= pm[j].p[cell][static_cast<std::size_t>(rec[static_cast<std::size_t>(members[j])])];
            }
            denom += term;
            if (x == observed) num = term;
        }
        out.total_nits += std::log(denom);
        out.record_cond_prob.push_back(num / denom);
    }
    out.total_nits = detail::check_length(out.total_nits);
    return out;
}

inline MessageLength mbp_mml(const DiscreteDataset& dataset, int target, const MbPolytree& tree,
                             const DirichletPrior& prior) {
    return {mbp_score_detail(dataset, target, tree, prior).total_nits};
}

}  // namespace mbmml

#endif
