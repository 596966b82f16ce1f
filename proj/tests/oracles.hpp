#pragma once

// Independent reference implementations ("oracles") used only by tests.
// Each deliberately takes a different algorithmic route than the library so
// that agreement is meaningful: the naive normalizer rewrites letter lists,
// distances come from literal BFS, ball sizes from a pattern recurrence, and
// geodesic enumeration from predecessor-DAG backtracking.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include "relhyp/group_model.hpp"

namespace oracles {

using relhyp::group_model::GroupSpec;
using relhyp::group_model::Letter;
using relhyp::group_model::NfHash;
using relhyp::group_model::NormalForm;
using relhyp::group_model::Syllable;
using relhyp::group_model::Word;

/**
 * Naive normal form: bubble same-factor letters together (sorting each run
 * by generator index) and cancel adjacent inverse letters, to a fixpoint;
 * then read off syllables.  Free reduction interleaved with per-factor
 * abelianization, done entirely on letter lists.
 */
inline NormalForm naive_nf(const GroupSpec& spec, const Word& w) {
    std::vector<Letter> ls = w.letters;
    bool changed = true;
    while (changed) {
        changed = false;
        // Cancellation pass: drop adjacent (g, +1)(g, -1) pairs.
        for (std::size_t i = 0; i + 1 < ls.size();) {
            if (ls[i].gen == ls[i + 1].gen && ls[i].sign == -ls[i + 1].sign) {
                ls.erase(ls.begin() + static_cast<std::ptrdiff_t>(i), ls.begin() + static_cast<std::ptrdiff_t>(i) + 2);
                changed = true;
                if (i > 0) --i;
            } else {
                ++i;
            }
        }
        // Abelianization pass: within same-factor runs, order by generator id.
        for (std::size_t i = 0; i + 1 < ls.size(); ++i) {
            const auto& ga = spec.generators[ls[i].gen];
            const auto& gb = spec.generators[ls[i + 1].gen];
            if (ga.factor == gb.factor && ls[i].gen > ls[i + 1].gen) {
                std::swap(ls[i], ls[i + 1]);
                changed = true;
            }
        }
    }
    // Read off syllables from the reduced, per-factor-sorted letter list.
    NormalForm nf;
    std::size_t i = 0;
    while (i < ls.size()) {
        const int factor = spec.generators[ls[i].gen].factor;
        Syllable s;
        s.factor = factor;
        s.exps.assign(static_cast<std::size_t>(spec.factors[factor].rank), 0);
        while (i < ls.size() && spec.generators[ls[i].gen].factor == factor) {
            s.exps[static_cast<std::size_t>(spec.generators[ls[i].gen].index)] += ls[i].sign;
            ++i;
        }
        if (!s.zero()) nf.syllables.push_back(std::move(s));
    }
    return nf;
}

/** Literal BFS over single-generator moves: distances from identity up to `radius`. */
inline std::unordered_map<NormalForm, int, NfHash> bfs_ball_x(const GroupSpec& spec, int radius) {
    std::unordered_map<NormalForm, int, NfHash> dist;
    std::queue<NormalForm> queue;
    dist.emplace(NormalForm{}, 0);
    queue.push(NormalForm{});
    while (!queue.empty()) {
        const NormalForm v = queue.front();
        queue.pop();
        const int d = dist.at(v);
        if (d == radius) continue;
        for (int gen = 0; gen < spec.total_rank(); ++gen) {
            for (const int sign : {+1, -1}) {
                NormalForm w = v;
                relhyp::group_model::detail::append_letter(spec, w.syllables, gen, sign);
                if (dist.emplace(w, d + 1).second) queue.push(std::move(w));
            }
        }
    }
    return dist;
}

/** #vectors in Z^rank with l1 norm exactly m (m >= 1). */
inline std::uint64_t l1_sphere_count(int rank, std::uint64_t m) {
    // sum over k nonzero coordinates: 2^k * C(rank,k) * C(m-1,k-1)
    std::uint64_t total = 0;
    for (std::uint64_t k = 1; k <= static_cast<std::uint64_t>(rank) && k <= m; ++k) {
        std::uint64_t c_rank_k = 1;
        for (std::uint64_t i = 0; i < k; ++i) c_rank_k = c_rank_k * (static_cast<std::uint64_t>(rank) - i) / (i + 1);
        std::uint64_t c_m1_k1 = 1;
        for (std::uint64_t i = 0; i < k - 1; ++i) c_m1_k1 = c_m1_k1 * (m - 1 - i) / (i + 1);
        total += (1ULL << k) * c_rank_k * c_m1_k1;
    }
    return total;
}

/**
 * Independent recursive ball counter (X metric): number of elements at
 * x_length exactly d, from the alternating-syllable pattern recurrence.
 */
inline std::vector<std::uint64_t> dp_shell_counts_x(const GroupSpec& spec, int radius) {
    const int nf = spec.factor_count();
    // ways[b][last+1] = # normal forms of total l1 exactly b whose first syllable avoids factor `last`
    std::vector<std::vector<std::uint64_t>> ways(static_cast<std::size_t>(radius) + 1,
                                                 std::vector<std::uint64_t>(static_cast<std::size_t>(nf) + 1, 0));
    for (int last = -1; last < nf; ++last) ways[0][static_cast<std::size_t>(last + 1)] = 1;
    for (int b = 1; b <= radius; ++b) {
        for (int last = -1; last < nf; ++last) {
            std::uint64_t total = 0;
            for (int f = 0; f < nf; ++f) {
                if (f == last) continue;
                for (int m = 1; m <= b; ++m)
                    total += l1_sphere_count(spec.factors[f].rank, static_cast<std::uint64_t>(m)) *
                             ways[static_cast<std::size_t>(b - m)][static_cast<std::size_t>(f + 1)];
            }
            ways[static_cast<std::size_t>(b)][static_cast<std::size_t>(last + 1)] = total;
        }
    }
    std::vector<std::uint64_t> shells;
    for (int d = 0; d <= radius; ++d) shells.push_back(ways[static_cast<std::size_t>(d)][0]);
    return shells;
}

/**
 * Independent recursive ball counter (relative metric, truncated): number of
 * elements with relative length exactly d whose peripheral syllables have
 * sup-norm <= exp_cap.
 */
inline std::vector<std::uint64_t> dp_shell_counts_rel(const GroupSpec& spec, int radius, int exp_cap) {
    const int nf = spec.factor_count();
    std::vector<std::vector<std::uint64_t>> ways(static_cast<std::size_t>(radius) + 1,
                                                 std::vector<std::uint64_t>(static_cast<std::size_t>(nf) + 1, 0));
    for (int last = -1; last < nf; ++last) ways[0][static_cast<std::size_t>(last + 1)] = 1;
    for (int b = 1; b <= radius; ++b) {
        for (int last = -1; last < nf; ++last) {
            std::uint64_t total = 0;
            for (int f = 0; f < nf; ++f) {
                if (f == last) continue;
                if (spec.factors[f].peripheral) {
                    std::uint64_t cnt = 1;
                    for (int r = 0; r < spec.factors[f].rank; ++r) cnt *= 2ULL * static_cast<std::uint64_t>(exp_cap) + 1;
                    total += (cnt - 1) * ways[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(f + 1)];
                } else {
                    for (int len = 1; len <= b; ++len)
                        total += 2ULL * ways[static_cast<std::size_t>(b - len)][static_cast<std::size_t>(f + 1)];
                }
            }
            ways[static_cast<std::size_t>(b)][static_cast<std::size_t>(last + 1)] = total;
        }
    }
    std::vector<std::uint64_t> shells;
    for (int d = 0; d <= radius; ++d) shells.push_back(ways[static_cast<std::size_t>(d)][0]);
    return shells;
}

/** All one-move neighbors in the truncated relative graph (peripheral sup-norm <= exp_cap). */
inline std::vector<NormalForm> rel_neighbors(const GroupSpec& spec, const NormalForm& v, int exp_cap) {
    using relhyp::group_model::multiply;
    std::vector<NormalForm> out;
    for (int f = 0; f < spec.factor_count(); ++f) {
        if (spec.factors[f].peripheral) {
            const int rank = spec.factors[f].rank;
            std::vector<std::int64_t> e(static_cast<std::size_t>(rank), -exp_cap);
            while (true) {
                bool zero = true;
                for (const auto x : e)
                    if (x != 0) zero = false;
                if (!zero) {
                    NormalForm h;
                    h.syllables.push_back({f, e});
                    out.push_back(multiply(spec, v, h));
                }
                int i = 0;
                while (i < rank && e[static_cast<std::size_t>(i)] == exp_cap) e[static_cast<std::size_t>(i++)] = -exp_cap;
                if (i == rank) break;
                ++e[static_cast<std::size_t>(i)];
            }
        } else {
            for (const int sign : {+1, -1}) {
                NormalForm h;
                h.syllables.push_back({f, {sign}});
                out.push_back(multiply(spec, v, h));
            }
        }
    }
    return out;
}

/** Literal truncated-relative-graph BFS distance from g to h (no domain restriction; use on tiny instances). */
inline std::optional<int> bfs_dist_rel(const GroupSpec& spec, const NormalForm& g, const NormalForm& h, int exp_cap,
                                       int max_depth) {
    if (g == h) return 0;
    std::unordered_map<NormalForm, int, NfHash> dist;
    std::queue<NormalForm> queue;
    dist.emplace(g, 0);
    queue.push(g);
    while (!queue.empty()) {
        const NormalForm v = queue.front();
        queue.pop();
        const int d = dist.at(v);
        if (d == max_depth) continue;
        for (auto& w : rel_neighbors(spec, v, exp_cap)) {
            if (dist.count(w)) continue;
            if (w == h) return d + 1;
            dist.emplace(w, d + 1);
            queue.push(std::move(w));
        }
    }
    return std::nullopt;
}

/**
 * Brute-force enumeration of ALL shortest-path vertex sequences from g to h
 * in the truncated relative graph, by BFS layering + predecessor-DAG
 * backtracking.  Exponential; only for tiny cross-check instances.
 */
inline std::vector<std::vector<NormalForm>> brute_rel_geodesic_vertex_paths(const GroupSpec& spec, const NormalForm& g,
                                                                            const NormalForm& h, int exp_cap) {
    std::vector<std::vector<NormalForm>> layers{{g}};
    std::unordered_map<NormalForm, int, NfHash> dist{{g, 0}};
    int dh = g == h ? 0 : -1;
    while (dh < 0) {
        std::vector<NormalForm> next;
        for (const auto& v : layers.back()) {
            for (auto& w : rel_neighbors(spec, v, exp_cap)) {
                if (dist.emplace(w, static_cast<int>(layers.size())).second) next.push_back(std::move(w));
            }
        }
        if (next.empty()) return {};
        if (dist.count(h) && dist.at(h) == static_cast<int>(layers.size())) dh = static_cast<int>(layers.size());
        layers.push_back(std::move(next));
    }
    // Walk back from h: predecessors are exactly the dist-(d-1) relative neighbors.
    std::vector<std::vector<NormalForm>> paths{{h}};
    for (int d = dh; d > 0; --d) {
        std::vector<std::vector<NormalForm>> extended;
        for (const auto& path : paths) {
            const NormalForm& tip = path.front();
            for (auto& w : rel_neighbors(spec, tip, exp_cap)) {
                const auto it = dist.find(w);
                if (it == dist.end() || it->second != d - 1) continue;
                std::vector<NormalForm> longer;
                longer.push_back(std::move(w));
                longer.insert(longer.end(), path.begin(), path.end());
                extended.push_back(std::move(longer));
            }
        }
        paths = std::move(extended);
    }
    return paths;
}

/** Minimum conjugator X-length within a BFS ball, or nullopt if none found there. */
inline std::optional<std::pair<NormalForm, std::uint64_t>> brute_min_conjugator(const GroupSpec& spec,
                                                                                const NormalForm& a, const NormalForm& b,
                                                                                int radius) {
    using relhyp::group_model::invert;
    using relhyp::group_model::multiply;
    const auto ball = bfs_ball_x(spec, radius);
    std::optional<std::pair<NormalForm, std::uint64_t>> best;
    for (const auto& [y, d] : ball) {
        if (multiply(spec, invert(y), multiply(spec, a, y)) == b) {
            if (!best || static_cast<std::uint64_t>(d) < best->second) best = {y, static_cast<std::uint64_t>(d)};
        }
    }
    return best;
}

}  // namespace oracles
