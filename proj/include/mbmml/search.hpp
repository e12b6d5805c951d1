#ifndef MBMML_SEARCH_HPP
#define MBMML_SEARCH_HPP

#include <future>
#include <string>
#include <vector>

#include "mbmml/common.hpp"
#include "mbmml/core.hpp"
#include "mbmml/iamb.hpp"
#include "mbmml/mml.hpp"
#include "mbmml/polytree.hpp"

namespace mbmml {

enum class ModelKind { Cpt, Nb, Mbp, Iamb };
enum class SymmetryMode { Union, Intersection, None };

inline std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::Cpt: return "cpt";
        case ModelKind::Nb: return "nb";
        case ModelKind::Mbp: return "mbp";
        case ModelKind::Iamb: return "iamb";
    }
    throw std::logic_error("unreachable");
}

inline std::string to_string(SymmetryMode s) {
    switch (s) {
        case SymmetryMode::Union: return "union";
        case SymmetryMode::Intersection: return "intersection";
        case SymmetryMode::None: return "none";
    }
    throw std::logic_error("unreachable");
}

// Symmetry defaults per method: CPT and MBP take union, NB intersection.
inline SymmetryMode default_symmetry(ModelKind m) {
    return m == ModelKind::Nb ? SymmetryMode::Intersection : SymmetryMode::Union;
}

struct SearchConfig {
    ModelKind model = ModelKind::Cpt;
    DirichletPrior prior;
    int mbp_samples = 100;  // K
    SymmetryMode symmetry = SymmetryMode::Union;
    std::uint64_t seed = 0;
    double significance = 0.01;          // IAMB only
    bool mbp_mean_code_length = false;   // average message lengths instead of probabilities
};

struct MarkovBlanketSet {
    std::string method;
    std::uint64_t seed = 0;
    double alpha = 1.0;
    std::string symmetry;
    std::string dataset_hash;
    std::vector<MarkovBlanket> blankets;  // one per variable, by index

    bool operator==(const MarkovBlanketSet&) const = default;
};

namespace detail {

// Ensemble score of one candidate MB set under the MBP model: the mixture
// code length for the target's conditional (negative log of the uniform
// average of per-record conditional probabilities) plus the uniform average
// of the trees' remaining cost. With mbp_mean_code_length the score is the
// plain mean of the trees' total message lengths.
inline double mbp_ensemble_nits(const DiscreteDataset& dataset, int target,
                                const std::set<int>& candidate, const SearchConfig& config,
                                std::uint64_t sample_seed) {
    const int n = static_cast<int>(candidate.size());
    std::vector<MbPolytree> trees;
    if (count_mbp(n) <= config.mbp_samples) {
        trees = enumerate_mbp(target, candidate, std::max(n, enumeration_cap_default()));
    } else {
        Rng rng(sample_seed);
        trees.reserve(static_cast<std::size_t>(config.mbp_samples));
        for (int i = 0; i < config.mbp_samples; ++i)
            trees.push_back(sample_mbp_uniform(target, candidate, rng));
    }

    const double inv = 1.0 / static_cast<double>(trees.size());
    if (config.mbp_mean_code_length) {
        double mean = 0.0;
        for (const auto& t : trees) mean += mbp_score_detail(dataset, target, t, config.prior).total_nits * inv;
        return mean;
    }

    const std::size_t n_rec = dataset.records.size();
    std::vector<double> mix(n_rec, 0.0);
    double mean_cost = 0.0;
    for (const auto& t : trees) {
        const auto s = mbp_score_detail(dataset, target, t, config.prior);
        double cond_nits = 0.0;
        for (std::size_t r = 0; r < n_rec; ++r) {
            cond_nits -= std::log(s.record_cond_prob[r]);
            mix[r] += s.record_cond_prob[r] * inv;
        }
        mean_cost += (s.total_nits - cond_nits) * inv;
    }
    double score = mean_cost;
    for (double p : mix) score -= std::log(p);
    return score;
}

}  // namespace detail

// Greedy forward selection with a fixed local model (Alg. 1). Admission
// requires strict score reduction; argmin ties break to the lowest index.
inline MarkovBlanket discover_mb_fixed(const DiscreteDataset& dataset, int target,
                                       const SearchConfig& config) {
    if (dataset.n_records() == 0) throw DataError("empty dataset");
    if (config.model != ModelKind::Cpt && config.model != ModelKind::Nb)
        throw std::invalid_argument("discover_mb_fixed: model must be CPT or NB");
    auto score = [&](const std::vector<int>& members) {
        return config.model == ModelKind::Cpt
                   ? cpt_mml(dataset, target, members, config.prior).nits
                   : nb_mml(dataset, target, members, config.prior).nits;
    };

    MarkovBlanket mb;
    mb.target = target;
    std::set<int> unchecked;
    for (int j = 0; j < dataset.n_vars(); ++j)
        if (j != target) unchecked.insert(j);
    double incumbent = score({});
    while (!unchecked.empty()) {
        int best = -1;
        double best_score = 0.0;
        for (int j : unchecked) {
            std::vector<int> members(mb.members.begin(), mb.members.end());
            members.push_back(j);
            const double s = score(members);
            if (best < 0 || s < best_score) {
                best = j;
                best_score = s;
            }
        }
        if (best_score < incumbent) {
            mb.members.insert(best);
            unchecked.erase(best);
            incumbent = best_score;
        } else {
            break;
        }
    }
    return mb;
}

// Greedy forward selection with the MBP ensemble (Alg. 2). Candidate sets of
// size z are scored over all MBPs when f(z) <= K, otherwise over K uniform
// samples with a per-(target, round, candidate) derived seed.
inline MarkovBlanket discover_mb_mbp(const DiscreteDataset& dataset, int target,
                                     const SearchConfig& config) {
    if (dataset.n_records() == 0) throw DataError("empty dataset");
    if (config.mbp_samples < 1) throw std::invalid_argument("discover_mb_mbp: K must be >= 1");

    MarkovBlanket mb;
    mb.target = target;
    std::set<int> unchecked;
    for (int j = 0; j < dataset.n_vars(); ++j)
        if (j != target) unchecked.insert(j);
    double incumbent =
        detail::mbp_ensemble_nits(dataset, target, {}, config,
                                  derive_seed(config.seed, {static_cast<std::uint64_t>(target), 0, 0}));
    std::uint64_t round = 1;
    while (!unchecked.empty()) {
        int best = -1;
        double best_score = 0.0;
        for (int j : unchecked) {
            std::set<int> candidate = mb.members;
            candidate.insert(j);
            const auto seed = derive_seed(
                config.seed, {static_cast<std::uint64_t>(target), round, static_cast<std::uint64_t>(j)});
            const double s = detail::mbp_ensemble_nits(dataset, target, candidate, config, seed);
            if (best < 0 || s < best_score) {
                best = j;
                best_score = s;
            }
        }
        if (best_score < incumbent) {
            mb.members.insert(best);
            unchecked.erase(best);
            incumbent = best_score;
            ++round;
        } else {
            break;
        }
    }
    return mb;
}

// Alg. 3: iterate targets then members in ascending index order; union inserts
// the missing reciprocal, intersection drops the unreciprocated member.
// Mutations are visible to later iterations.
inline void enforce_symmetry(MarkovBlanketSet& mbs, SymmetryMode mode) {
    if (mode == SymmetryMode::None) return;
    for (auto& mb : mbs.blankets) {
        for (int j : std::vector<int>(mb.members.begin(), mb.members.end())) {
            auto& other = mbs.blankets[static_cast<std::size_t>(j)].members;
            if (!other.count(mb.target)) {
                if (mode == SymmetryMode::Union)
                    other.insert(mb.target);
                else
                    mb.members.erase(j);
            }
        }
    }
    mbs.symmetry = to_string(mode);
}

inline MarkovBlanket discover_one(const DiscreteDataset& dataset, int target,
                                  const SearchConfig& config) {
    switch (config.model) {
        case ModelKind::Cpt:
        case ModelKind::Nb: return discover_mb_fixed(dataset, target, config);
        case ModelKind::Mbp: return discover_mb_mbp(dataset, target, config);
        case ModelKind::Iamb: return iamb(dataset, target, config.significance);
    }
    throw std::logic_error("unreachable");
}

// Per-target discovery for every variable (concurrent), then the configured
// symmetry post-pass (sequential; Alg. 3's mutation order matters).
inline MarkovBlanketSet discover_all(const DiscreteDataset& dataset, const SearchConfig& config,
                                     int jobs = 0) {
    if (dataset.n_records() == 0) throw DataError("empty dataset");
    MarkovBlanketSet out;
    out.method = to_string(config.model);
    out.seed = config.seed;
    out.alpha = config.prior.alpha;
    out.symmetry = to_string(config.symmetry);
    char digest[17];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(fnv1a(dataset_csv(dataset))));
    out.dataset_hash = digest;

    const int n = dataset.n_vars();
    out.blankets.resize(static_cast<std::size_t>(n));
    if (jobs == 1 || n == 1) {
        for (int i = 0; i < n; ++i)
            out.blankets[static_cast<std::size_t>(i)] = discover_one(dataset, i, config);
    } else {
        std::vector<std::future<MarkovBlanket>> futures;
        futures.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            futures.push_back(std::async(std::launch::async,
                                         [&dataset, &config, i] { return discover_one(dataset, i, config); }));
        for (int i = 0; i < n; ++i)
            out.blankets[static_cast<std::size_t>(i)] = futures[static_cast<std::size_t>(i)].get();
    }
    enforce_symmetry(out, config.symmetry);
    return out;
}

}  // namespace mbmml

#endif
