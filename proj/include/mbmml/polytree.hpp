#ifndef MBMML_POLYTREE_HPP
#define MBMML_POLYTREE_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "mbmml/common.hpp"
#include "mbmml/core.hpp"

namespace mbmml {

// A singly connected local structure over {target} ∪ MB. Every MB member is a
// parent of the target, a child of the target, or a co-parent (spouse) of
// exactly one child.
struct MbPolytree {
    int target = -1;
    std::vector<int> nodes;                  // target + members, ascending
    std::vector<std::pair<int, int>> edges;  // (parent, child), kept sorted

    void normalize() {
        std::sort(nodes.begin(), nodes.end());
        std::sort(edges.begin(), edges.end());
    }

    std::vector<int> parents_of(int v) const {
        std::vector<int> out;
        for (const auto& [p, c] : edges)
            if (c == v) out.push_back(p);
        return out;
    }

    std::vector<int> children_of(int v) const {
        std::vector<int> out;
        for (const auto& [p, c] : edges)
            if (p == v) out.push_back(c);
        return out;
    }

    // Sorted edge list rendered as text; canonical identity for dedup and
    // deterministic ordering.
    std::string canonical() const {
        auto sorted = edges;
        std::sort(sorted.begin(), sorted.end());
        std::string s;
        for (const auto& [p, c] : sorted) {
            s += std::to_string(p);
            s += '>';
            s += std::to_string(c);
            s += ';';
        }
        return s;
    }

    bool operator==(const MbPolytree& other) const {
        return target == other.target && nodes == other.nodes && canonical() == other.canonical();
    }
};

// True iff the structure is a polytree over {target} ∪ mb_set whose induced
// Markov Blanket of the target equals mb_set.
inline bool is_valid_mbp(const MbPolytree& t, int target, const std::set<int>& mb_set) {
    if (t.target != target) return false;
    std::set<int> expected_nodes = mb_set;
    expected_nodes.insert(target);
    if (std::set<int>(t.nodes.begin(), t.nodes.end()) != expected_nodes) return false;
    if (mb_set.count(target)) return false;

    // Underlying undirected graph must be a tree over the node set.
    if (t.edges.size() != expected_nodes.size() - 1) return false;
    std::set<std::pair<int, int>> undirected;
    for (const auto& [p, c] : t.edges) {
        if (!expected_nodes.count(p) || !expected_nodes.count(c) || p == c) return false;
        undirected.insert({std::min(p, c), std::max(p, c)});
    }
    if (undirected.size() != t.edges.size()) return false;  // parallel or 2-cycle edges
    std::map<int, std::vector<int>> adj;
    for (const auto& [a, b] : undirected) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::set<int> seen{target};
    std::vector<int> stack{target};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u : adj[v])
            if (seen.insert(u).second) stack.push_back(u);
    }
    if (seen != expected_nodes) return false;  // |E| = |V|-1 and connected => tree

    // Markov Blanket of the target within the tree must equal mb_set.
    std::set<int> mb_in_tree;
    for (int p : t.parents_of(target)) mb_in_tree.insert(p);
    for (int c : t.children_of(target)) {
        mb_in_tree.insert(c);
        for (int s : t.parents_of(c))
            if (s != target) mb_in_tree.insert(s);
    }
    return mb_in_tree == mb_set;
}

namespace detail {

inline const mpz_class& binom(int n, int k) {
    static std::map<std::pair<int, int>, mpz_class> cache;
    static const mpz_class zero = 0;
    if (k < 0 || k > n) return zero;
    const auto key = std::make_pair(n, k);
    auto it = cache.find(key);
    if (it == cache.end()) {
        mpz_class v;
        mpz_bin_uiui(v.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
        it = cache.emplace(key, std::move(v)).first;
    }
    return it->second;
}

inline mpz_class pow2(int n) {
    mpz_class v = 1;
    mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(n));
    return v;
}

// g(n, m, k): MBP structures over n members with m colliders where the
// largest branch carries k spouses, as an exact rational (the 1/m tie
// corrections cancel only in aggregate).
inline const mpq_class& count_g(int n, int m, int k) {
    static std::map<std::tuple<int, int, int>, mpq_class> cache;
    const auto key = std::make_tuple(n, m, k);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    mpq_class value;
    const mpz_class branch = binom(n, k + 1) * (k + 1);
    if (m == 1) {
        // Remaining n-k-1 members are plain parents or children.
        value = mpq_class(branch * pow2(n - k - 1));
    } else {
        mpq_class inner = 0;
        const int k_hi = std::min(k, n - k - 2 * (m - 1));
        for (int kp = 1; kp <= k_hi; ++kp) {
            const int q = (kp == k) ? 1 : m;
            inner += mpq_class(q, m) * count_g(n - k - 1, m - 1, kp);
        }
        value = mpq_class(branch) * inner;
    }
    value.canonicalize();
    return cache.emplace(key, std::move(value)).first->second;
}

// B(r): partitions of r labeled members into branches, each branch a
// designated child plus a (possibly empty) spouse set. Drives enumeration
// order and unranking; totals agree with count_mbp.
inline const mpz_class& branch_count(int r) {
    static std::vector<mpz_class> cache{1};
    while (static_cast<int>(cache.size()) <= r) {
        const int m = static_cast<int>(cache.size());
        mpz_class total = 0;
        for (int s = 1; s <= m; ++s) total += binom(m - 1, s - 1) * s * cache[static_cast<std::size_t>(m - s)];
        cache.push_back(std::move(total));
    }
    return cache[static_cast<std::size_t>(r)];
}

// k-subsets of 0..m-1 in lexicographic order of the sorted index list.
inline std::vector<int> unrank_combination(int m, int k, mpz_class rank) {
    std::vector<int> out;
    int next = 0;
    for (int slot = 0; slot < k; ++slot) {
        for (int v = next;; ++v) {
            const mpz_class& block = binom(m - v - 1, k - slot - 1);
            if (rank < block) {
                out.push_back(v);
                next = v + 1;
                break;
            }
            rank -= block;
        }
    }
    return out;
}

struct Branch {
    int child;
    std::vector<int> spouses;
};

// Decode a branch partition of `pool` (ascending member indices).
inline std::vector<Branch> unrank_partition(std::vector<int> pool, mpz_class rank) {
    std::vector<Branch> branches;
    while (!pool.empty()) {
        const int r = static_cast<int>(pool.size());
        int size = 0;
        for (int s = 1; s <= r; ++s) {
            const mpz_class block = binom(r - 1, s - 1) * s * branch_count(r - s);
            if (rank < block) {
                size = s;
                break;
            }
            rank -= block;
        }
        const mpz_class per_subset = mpz_class(size) * branch_count(r - size);
        mpz_class subset_rank, rest;
        mpz_fdiv_qr(subset_rank.get_mpz_t(), rest.get_mpz_t(), rank.get_mpz_t(), per_subset.get_mpz_t());
        mpz_class child_rank, tail;
        const mpz_class bc = branch_count(r - size);
        mpz_fdiv_qr(child_rank.get_mpz_t(), tail.get_mpz_t(), rest.get_mpz_t(), bc.get_mpz_t());

        const auto rel = unrank_combination(r - 1, size - 1, subset_rank);
        std::vector<int> block{pool.front()};
        for (int idx : rel) block.push_back(pool[static_cast<std::size_t>(idx + 1)]);
        Branch b;
        b.child = block[static_cast<std::size_t>(child_rank.get_ui())];
        for (int v : block)
            if (v != b.child) b.spouses.push_back(v);
        branches.push_back(std::move(b));

        std::vector<int> remaining;
        for (int v : pool)
            if (std::find(block.begin(), block.end(), v) == block.end()) remaining.push_back(v);
        pool = std::move(remaining);
        rank = std::move(tail);
    }
    return branches;
}

inline MbPolytree assemble(int target, const std::vector<int>& parents,
                           const std::vector<Branch>& branches, const std::vector<int>& mb_sorted) {
    MbPolytree t;
    t.target = target;
    t.nodes = mb_sorted;
    t.nodes.push_back(target);
    for (int p : parents) t.edges.emplace_back(p, target);
    for (const auto& b : branches) {
        t.edges.emplace_back(target, b.child);
        for (int s : b.spouses) t.edges.emplace_back(s, b.child);
    }
    t.normalize();
    return t;
}

template <typename Fn>
void for_each_combination(int m, int k, Fn&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

template <typename Fn>
void for_each_partition(const std::vector<int>& pool, std::vector<Branch>& acc, Fn&& fn) {
    if (pool.empty()) {
        fn(acc);
        return;
    }
    const int r = static_cast<int>(pool.size());
    for (int s = 1; s <= r; ++s) {
        for_each_combination(r - 1, s - 1, [&](const std::vector<int>& rel) {
            std::vector<int> block{pool.front()};
            for (int idx : rel) block.push_back(pool[static_cast<std::size_t>(idx + 1)]);
            std::vector<int> remaining;
            for (int v : pool)
                if (std::find(block.begin(), block.end(), v) == block.end()) remaining.push_back(v);
            for (int child : block) {
                Branch b;
                b.child = child;
                for (int v : block)
                    if (v != child) b.spouses.push_back(v);
                acc.push_back(std::move(b));
                for_each_partition(remaining, acc, fn);
                acc.pop_back();
            }
        });
    }
}

}  // namespace detail

namespace detail {

// Size-ordered count: branches listed largest first, with a q/m correction
// dividing runs of equal-size branches. The correction divides by the number
// of remaining branches instead of the size of the tied group, so this
// undercounts from n = 8 on (first bad case: spouse counts 2,2,1). Kept as a
// cross-check for n <= 7, where it is exact.
inline mpz_class count_mbp_size_ordered(int n) {
    if (n < 0) throw std::invalid_argument("count_mbp_size_ordered: n must be non-negative");
    mpq_class total = pow2(n);  // m = 0: every member a parent or child
    for (int m = 1; 2 * m <= n; ++m)
        for (int k = 1; k <= n - 2 * m + 1; ++k) total += count_g(n, m, k);
    total.canonicalize();
    if (total.get_den() != 1)
        throw StructureError("count_mbp_size_ordered: tie corrections did not cancel");
    return total.get_num();
}

}  // namespace detail

// f(n): exact count of labeled MBPs over a Markov Blanket of size n. Sum over
// the parent-subset size of C(n, p) * B(n - p), where B counts the branch
// partitions of the non-parent members. Matches exhaustive enumeration for
// every n where enumeration is feasible and drives unranking, so counting and
// sampling share one order.
inline mpz_class count_mbp(int n) {
    if (n < 0) throw std::invalid_argument("count_mbp: n must be non-negative");
    mpz_class total = 0;
    for (int p = 0; p <= n; ++p) total += detail::binom(n, p) * detail::branch_count(n - p);
    return total;
}

inline int enumeration_cap_default() { return 7; }

// All labeled MBPs over {target} ∪ mb_set in canonical order: parent subsets
// by size then lexicographic member choice, branch partitions recursively by
// the lowest remaining member. sample_mbp_uniform unranks in the same order.
inline std::vector<MbPolytree> enumerate_mbp(int target, const std::set<int>& mb_set,
                                             int cap = enumeration_cap_default()) {
    if (static_cast<int>(mb_set.size()) > cap)
        throw std::invalid_argument("enumerate_mbp: MB size exceeds enumeration cap");
    if (mb_set.count(target)) throw StructureError("enumerate_mbp: target inside MB set");
    const std::vector<int> mb(mb_set.begin(), mb_set.end());
    const int n = static_cast<int>(mb.size());
    std::vector<MbPolytree> out;
    for (int p = 0; p <= n; ++p) {
        detail::for_each_combination(n, p, [&](const std::vector<int>& pick) {
            std::vector<int> parents;
            std::vector<bool> is_parent(static_cast<std::size_t>(n), false);
            for (int idx : pick) {
                parents.push_back(mb[static_cast<std::size_t>(idx)]);
                is_parent[static_cast<std::size_t>(idx)] = true;
            }
            std::vector<int> rest;
            for (int i = 0; i < n; ++i)
                if (!is_parent[static_cast<std::size_t>(i)]) rest.push_back(mb[static_cast<std::size_t>(i)]);
            std::vector<detail::Branch> acc;
            detail::for_each_partition(rest, acc, [&](const std::vector<detail::Branch>& branches) {
                out.push_back(detail::assemble(target, parents, branches, mb));
            });
        });
    }
    return out;
}

// Decode rank j in [0, f(n)) into the j-th structure of enumerate_mbp's order.
inline MbPolytree unrank_mbp(int target, const std::set<int>& mb_set, mpz_class rank) {
    const std::vector<int> mb(mb_set.begin(), mb_set.end());
    const int n = static_cast<int>(mb.size());
    int p = -1;
    for (int size = 0; size <= n; ++size) {
        const mpz_class block = detail::binom(n, size) * detail::branch_count(n - size);
        if (rank < block) {
            p = size;
            break;
        }
        rank -= block;
    }
    if (p < 0) throw std::invalid_argument("unrank_mbp: rank out of range");
    const mpz_class per_subset = detail::branch_count(n - p);
    mpz_class subset_rank, rest;
    mpz_fdiv_qr(subset_rank.get_mpz_t(), rest.get_mpz_t(), rank.get_mpz_t(), per_subset.get_mpz_t());
    const auto pick = detail::unrank_combination(n, p, subset_rank);
    std::vector<int> parents;
    std::vector<bool> is_parent(static_cast<std::size_t>(n), false);
    for (int idx : pick) {
        parents.push_back(mb[static_cast<std::size_t>(idx)]);
        is_parent[static_cast<std::size_t>(idx)] = true;
    }
    std::vector<int> pool;
    for (int i = 0; i < n; ++i)
        if (!is_parent[static_cast<std::size_t>(i)]) pool.push_back(mb[static_cast<std::size_t>(i)]);
    const auto branches = detail::unrank_partition(pool, rest);
    return detail::assemble(target, parents, branches, mb);
}

// Exactly uniform over all f(|mb_set|) labeled MBPs.
inline MbPolytree sample_mbp_uniform(int target, const std::set<int>& mb_set, Rng& rng) {
    const mpz_class total = count_mbp(static_cast<int>(mb_set.size()));
    const std::size_t bits = mpz_sizeinbase(total.get_mpz_t(), 2);
    mpz_class rank;
    do {
        rank = 0;
        std::size_t produced = 0;
        while (produced < bits) {
            const std::uint64_t word = rng.next_u64();
            mpz_mul_2exp(rank.get_mpz_t(), rank.get_mpz_t(), 32);
            rank += static_cast<unsigned long>(word >> 32);
            mpz_mul_2exp(rank.get_mpz_t(), rank.get_mpz_t(), 32);
            rank += static_cast<unsigned long>(word & 0xffffffffULL);
            produced += 64;
        }
        mpz_fdiv_r_2exp(rank.get_mpz_t(), rank.get_mpz_t(), static_cast<unsigned long>(bits));
    } while (rank >= total);
    return unrank_mbp(target, mb_set, rank);
}

// The generic random-polytree generator (random total order, arcs suppressed
// when they would close an undirected loop), retried until the result is a
// valid MBP. Not uniform over MBPs; provided for fidelity experiments only.
inline MbPolytree sample_mbp_footnote(int target, const std::set<int>& mb_set, Rng& rng) {
    std::vector<int> nodes(mb_set.begin(), mb_set.end());
    nodes.push_back(target);
    std::sort(nodes.begin(), nodes.end());
    const int n = static_cast<int>(nodes.size());
    for (;;) {
        const auto order = rng.permutation(n);
        // Union-find over node positions to suppress undirected loops.
        std::vector<int> uf(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) uf[static_cast<std::size_t>(i)] = i;
        auto find = [&](int x) {
            while (uf[static_cast<std::size_t>(x)] != x) x = uf[static_cast<std::size_t>(x)] = uf[static_cast<std::size_t>(uf[static_cast<std::size_t>(x)])];
            return x;
        };
        MbPolytree t;
        t.target = target;
        t.nodes = nodes;
        for (int pos = 1; pos < n; ++pos) {
            const int child = nodes[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])];
            const auto want = static_cast<int>(rng.below(static_cast<std::uint64_t>(pos) + 1));
            auto perm = rng.permutation(pos);
            int added = 0;
            for (int j = 0; j < pos && added < want; ++j) {
                const int parent = nodes[static_cast<std::size_t>(order[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])])];
                const int a = find(order[static_cast<std::size_t>(pos)]);
                const int b = find(order[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])]);
                if (a == b) continue;
                uf[static_cast<std::size_t>(a)] = b;
                t.edges.emplace_back(parent, child);
                ++added;
            }
        }
        t.normalize();
        if (is_valid_mbp(t, target, mb_set)) return t;
    }
}

}  // namespace mbmml

#endif
