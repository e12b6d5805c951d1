#ifndef MBMML_IAMB_HPP
#define MBMML_IAMB_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "mbmml/common.hpp"
#include "mbmml/core.hpp"

namespace mbmml {

struct CiTestResult {
    double mi = 0.0;      // conditional mutual information, nits
    double g2 = 0.0;      // 2 * N * mi
    long long dof = 1;    // (r_x-1)(r_y-1) * prod r_Z
    double p_value = 1.0; // upper-tail chi-square probability
    bool independent = true;
    bool insufficient_data = false;  // N < 5 * dof guard fired
};

// Plug-in conditional mutual information with a G^2 likelihood-ratio test.
// Zero-count cells contribute zero. Declares independence when
// p_value > significance, or unconditionally when N < 5 * dof.
inline CiTestResult conditional_mi(const DiscreteDataset& dataset, int x, int y,
                                   const std::vector<int>& z, double significance = 0.01) {
    if (dataset.n_records() == 0) throw DataError("empty dataset");
    if (x == y) throw StructureError("conditional_mi: x and y must differ");
    for (int v : z)
        if (v == x || v == y) throw StructureError("conditional_mi: x or y inside conditioning set");

    std::vector<int> cond = z;
    std::sort(cond.begin(), cond.end());
    const int rx = dataset.variables[static_cast<std::size_t>(x)].arity;
    const int ry = dataset.variables[static_cast<std::size_t>(y)].arity;
    std::size_t rz = 1;
    for (int v : cond) rz *= static_cast<std::size_t>(dataset.variables[static_cast<std::size_t>(v)].arity);

    const std::size_t n_xy = static_cast<std::size_t>(rx) * static_cast<std::size_t>(ry);
    std::vector<long long> nxyz(rz * n_xy, 0);
    std::vector<long long> nxz(rz * static_cast<std::size_t>(rx), 0);
    std::vector<long long> nyz(rz * static_cast<std::size_t>(ry), 0);
    std::vector<long long> nz(rz, 0);
    for (const auto& rec : dataset.records) {
        std::size_t cz = 0;
        for (int v : cond)
            cz = cz * static_cast<std::size_t>(dataset.variables[static_cast<std::size_t>(v)].arity) +
                 static_cast<std::size_t>(rec[static_cast<std::size_t>(v)]);
        const auto vx = static_cast<std::size_t>(rec[static_cast<std::size_t>(x)]);
        const auto vy = static_cast<std::size_t>(rec[static_cast<std::size_t>(y)]);
        ++nxyz[cz * n_xy + vx * static_cast<std::size_t>(ry) + vy];
        ++nxz[cz * static_cast<std::size_t>(rx) + vx];
        ++nyz[cz * static_cast<std::size_t>(ry) + vy];
        ++nz[cz];
    }

    const double n = static_cast<double>(dataset.n_records());
    double mi = 0.0;
    for (std::size_t cz = 0; cz < rz; ++cz) {
        for (int a = 0; a < rx; ++a) {
            for (int b = 0; b < ry; ++b) {
                const long long c = nxyz[cz * n_xy + static_cast<std::size_t>(a) * static_cast<std::size_t>(ry) +
                                         static_cast<std::size_t>(b)];
                if (c == 0) continue;
                mi += static_cast<double>(c) / n *
                      std::log(static_cast<double>(c) * static_cast<double>(nz[cz]) /
                               (static_cast<double>(nxz[cz * static_cast<std::size_t>(rx) + static_cast<std::size_t>(a)]) *
                                static_cast<double>(nyz[cz * static_cast<std::size_t>(ry) + static_cast<std::size_t>(b)])));
            }
        }
    }
    if (mi < 0.0) {
        if (mi < -1e-12) throw StructureError("negative conditional mutual information");
        mi = 0.0;
    }

    CiTestResult r;
    r.mi = mi;
    r.g2 = 2.0 * n * mi;
    r.dof = static_cast<long long>(rx - 1) * static_cast<long long>(ry - 1) *
            static_cast<long long>(rz);
    if (n < 5.0 * static_cast<double>(r.dof)) {
        r.insufficient_data = true;
        r.independent = true;
        r.p_value = 1.0;
        return r;
    }
    r.p_value = boost::math::gamma_q(static_cast<double>(r.dof) / 2.0, r.g2 / 2.0);
    r.independent = r.p_value > significance;
    return r;
}

// IAMB: grow by repeatedly adding the variable with maximal conditional MI
// given the current blanket when its test rejects independence; then shrink
// by removing members independent of the target given the rest, in ascending
// index order, re-testing after each removal.
inline MarkovBlanket iamb(const DiscreteDataset& dataset, int target, double significance = 0.01) {
    if (dataset.n_records() == 0) throw DataError("empty dataset");
    MarkovBlanket mb;
    mb.target = target;
    const int n = dataset.n_vars();

    for (;;) {
        const std::vector<int> cond(mb.members.begin(), mb.members.end());
        int best = -1;
        CiTestResult best_result;
        for (int j = 0; j < n; ++j) {
            if (j == target || mb.members.count(j)) continue;
            const auto res = conditional_mi(dataset, target, j, cond, significance);
            if (best < 0 || res.mi > best_result.mi) {
                best = j;
                best_result = res;
            }
        }
        if (best < 0 || best_result.independent) break;
        mb.members.insert(best);
    }

    bool removed = true;
    while (removed) {
        removed = false;
        for (int j : std::vector<int>(mb.members.begin(), mb.members.end())) {
            std::vector<int> cond;
            for (int k : mb.members)
                if (k != j) cond.push_back(k);
            if (conditional_mi(dataset, target, j, cond, significance).independent) {
                mb.members.erase(j);
                removed = true;
                break;
            }
        }
    }
    return mb;
}

}  // namespace mbmml

#endif
