#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "relhyp/group_model.hpp"
#include "relhyp/util.hpp"

namespace relhyp::cayley {

using group_model::GroupSpec;
using group_model::NfHash;
using group_model::NormalForm;
using group_model::Syllable;
using group_model::invert;
using group_model::multiply;
using group_model::rel_length;
using group_model::x_length;

/**
 * One edge of a path: either a single generator (an edge of the plain Cayley
 * graph; XStep is allowed for any generator) or one coset move inside a
 * peripheral subgroup (an edge of the relative graph; PeripheralStep only for
 * peripheral factors, with a nonzero exponent vector).
 */
struct EdgeLabel {
    enum class Type { XStep, PeripheralStep };

    Type type = Type::XStep;
    int gen = 0;                      ///< XStep: global generator id
    int sign = +1;                    ///< XStep: exponent
    int factor = -1;                  ///< PeripheralStep: factor index
    std::vector<std::int64_t> exps;   ///< PeripheralStep: nonzero exponent vector

    static EdgeLabel x_step(int gen, int sign) {
        EdgeLabel e;
        e.type = Type::XStep;
        e.gen = gen;
        e.sign = sign;
        return e;
    }

    static EdgeLabel peripheral_step(int factor, std::vector<std::int64_t> exps) {
        EdgeLabel e;
        e.type = Type::PeripheralStep;
        e.factor = factor;
        e.exps = std::move(exps);
        return e;
    }

    bool operator==(const EdgeLabel&) const = default;
};

/** The group element an edge traverses. */
inline NormalForm element_of(const GroupSpec& spec, const EdgeLabel& e) {
    NormalForm nf;
    if (e.type == EdgeLabel::Type::XStep) {
        group_model::detail::append_letter(spec, nf.syllables, e.gen, e.sign);
    } else {
        group_model::detail::append_syllable(nf.syllables, e.factor, e.exps);
    }
    return nf;
}

/** The factor an edge moves in. */
inline int factor_of(const GroupSpec& spec, const EdgeLabel& e) {
    return e.type == EdgeLabel::Type::XStep ? spec.generators[e.gen].factor : e.factor;
}

/** Contribution of one edge to the X-length of a path's label. */
inline std::uint64_t x_cost(const EdgeLabel& e) {
    if (e.type == EdgeLabel::Type::XStep) return 1;
    std::uint64_t n = 0;
    for (const auto v : e.exps) n += abs_u64(v);
    return n;
}

/**
 * A walk in the Cayley graph or the relative graph: a start vertex, typed
 * edges, and the cached vertex list (vertices[k+1] = vertices[k] * edge k).
 * Construct via path_from so the vertex cache is always consistent.
 */
struct Path {
    NormalForm start;
    std::vector<EdgeLabel> edges;
    std::vector<NormalForm> vertices;

    const NormalForm& end() const { return vertices.back(); }
    std::size_t length() const { return edges.size(); }

    bool operator==(const Path&) const = default;
};

inline Path path_from(const GroupSpec& spec, NormalForm start, std::vector<EdgeLabel> edges) {
    Path p;
    p.start = std::move(start);
    p.edges = std::move(edges);
    p.vertices.reserve(p.edges.size() + 1);
    p.vertices.push_back(p.start);
    for (const auto& e : p.edges) p.vertices.push_back(multiply(spec, p.vertices.back(), element_of(spec, e)));
    return p;
}

/** φ(p): the element the path's label spells (start^-1 * end). */
inline NormalForm label_of(const GroupSpec& spec, const Path& p) {
    NormalForm g;
    for (const auto& e : p.edges) g = multiply(spec, g, element_of(spec, e));
    return g;
}

/** Relative length of a path: every edge (XStep or coset move) counts once. */
inline std::uint64_t rel_path_length(const Path& p) { return p.edges.size(); }

/** X-length of a path's label walked edge by edge. */
inline std::uint64_t x_path_length(const Path& p) {
    std::uint64_t n = 0;
    for (const auto& e : p.edges) n += x_cost(e);
    return n;
}

/**
 * Canonical edge order: factor order, then generator order, then +1 before
 * -1.  The id doubles as the tie-break key for geodesics and shell sorting.
 */
inline int edge_id(int gen, int sign) { return 2 * gen + (sign < 0 ? 1 : 0); }

/**
 * The canonical spelling of an element: per syllable, generators in factor
 * order, each as a run of equal-signed letters.  This is the lexicographically
 * least geodesic word from the identity under the canonical edge order (no
 * letter can cross a syllable boundary, and within a syllable any interleaving
 * is geodesic, so sorting by edge id is optimal).
 */
inline std::vector<std::uint8_t> canonical_key(const GroupSpec& spec, const NormalForm& nf) {
    std::vector<std::uint8_t> key;
    for (const auto& s : nf.syllables) {
        int base = 0;
        for (int f = 0; f < s.factor; ++f) base += spec.factors[f].rank;
        for (std::size_t i = 0; i < s.exps.size(); ++i) {
            const std::int64_t e = s.exps[i];
            if (e == 0) continue;
            const auto id = static_cast<std::uint8_t>(edge_id(base + static_cast<int>(i), e < 0 ? -1 : +1));
            for (std::uint64_t k = 0; k < abs_u64(e); ++k) key.push_back(id);
        }
    }
    return key;
}

/** dist_X(g, h) = ||g^-1 h||_X, computed without building the product. */
inline std::uint64_t dist_X(const GroupSpec& spec, const NormalForm& g, const NormalForm& h) {
    (void)spec;
    const auto& a = g.syllables;
    const auto& b = h.syllables;
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    std::uint64_t total = 0;
    const auto l1 = [](const Syllable& s) {
        std::uint64_t n = 0;
        for (const auto e : s.exps) n += abs_u64(e);
        return n;
    };
    std::size_t ia = i, ib = i;
    if (i < a.size() && i < b.size() && a[i].factor == b[i].factor) {
        // g^-1 h needs one merged boundary syllable b[i] - a[i] (nonzero).
        for (std::size_t k = 0; k < a[i].exps.size(); ++k)
            total += abs_u64(checked_add(b[i].exps[k], checked_neg(a[i].exps[k])));
        ++ia;
        ++ib;
    }
    for (; ia < a.size(); ++ia) total += l1(a[ia]);
    for (; ib < b.size(); ++ib) total += l1(b[ib]);
    return total;
}

/** dist_rel(g, h) = |g^-1 h| relative, computed without building the product. */
inline std::uint64_t dist_rel(const GroupSpec& spec, const NormalForm& g, const NormalForm& h) {
    const auto& a = g.syllables;
    const auto& b = h.syllables;
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    std::uint64_t total = 0;
    const auto cost = [&spec](const Syllable& s) -> std::uint64_t {
        if (spec.peripheral(s.factor)) return 1;
        std::uint64_t n = 0;
        for (const auto e : s.exps) n += abs_u64(e);
        return n;
    };
    std::size_t ia = i, ib = i;
    if (i < a.size() && i < b.size() && a[i].factor == b[i].factor) {
        if (spec.peripheral(a[i].factor)) {
            total += 1;
        } else {
            for (std::size_t k = 0; k < a[i].exps.size(); ++k)
                total += abs_u64(checked_add(b[i].exps[k], checked_neg(a[i].exps[k])));
        }
        ++ia;
        ++ib;
    }
    for (; ia < a.size(); ++ia) total += cost(a[ia]);
    for (; ib < b.size(); ++ib) total += cost(b[ib]);
    return total;
}

/**
 * The canonical Cayley-graph geodesic from g to h: spell g^-1 h syllable by
 * syllable, letters within a syllable in canonical edge order.  Deterministic
 * and lexicographically least among all geodesics.
 */
inline Path geodesic_X(const GroupSpec& spec, const NormalForm& g, const NormalForm& h) {
    const NormalForm w = multiply(spec, invert(g), h);
    std::vector<EdgeLabel> edges;
    for (const auto& s : w.syllables) {
        int base = 0;
        for (int f = 0; f < s.factor; ++f) base += spec.factors[f].rank;
        for (std::size_t i = 0; i < s.exps.size(); ++i) {
            const std::int64_t e = s.exps[i];
            for (std::uint64_t k = 0; k < abs_u64(e); ++k)
                edges.push_back(EdgeLabel::x_step(base + static_cast<int>(i), e < 0 ? -1 : +1));
        }
    }
    return path_from(spec, g, std::move(edges));
}

/**
 * The canonical relative geodesic from g to h: each peripheral syllable of
 * g^-1 h becomes one PeripheralStep (a full coset move), each non-peripheral
 * syllable a run of XSteps.
 */
inline Path geodesic_rel(const GroupSpec& spec, const NormalForm& g, const NormalForm& h) {
    const NormalForm w = multiply(spec, invert(g), h);
    std::vector<EdgeLabel> edges;
    for (const auto& s : w.syllables) {
        if (spec.peripheral(s.factor)) {
            edges.push_back(EdgeLabel::peripheral_step(s.factor, s.exps));
            continue;
        }
        int base = 0;
        for (int f = 0; f < s.factor; ++f) base += spec.factors[f].rank;
        const std::int64_t e = s.exps[0];
        for (std::uint64_t k = 0; k < abs_u64(e); ++k) edges.push_back(EdgeLabel::x_step(base, e < 0 ? -1 : +1));
    }
    return path_from(spec, g, std::move(edges));
}

/**
 * Shells of the X-metric ball around the identity, grown lazily one radius at
 * a time and kept in canonical order.  Iterative deepening never re-enumerates
 * (shells are cached); memory grows with the shells, so deep radii on groups
 * with many generators are the caller's responsibility.
 */
class ShellEnumerator {
  public:
    explicit ShellEnumerator(const GroupSpec& spec) : spec_(&spec) {
        shells_.push_back({NormalForm{}});
    }

    /** Elements at X-distance exactly d from the identity, canonically sorted. */
    const std::vector<NormalForm>& shell(int d) {
        while (static_cast<int>(shells_.size()) <= d) grow();
        return shells_[static_cast<std::size_t>(d)];
    }

  private:
    void grow() {
        const auto& last = shells_.back();
        std::unordered_set<NormalForm, NfHash> next;
        for (const auto& nf : last) {
            for (int gen = 0; gen < spec_->total_rank(); ++gen) {
                const auto& g = spec_->generators[gen];
                for (const int sign : {+1, -1}) {
                    // Appending grows the length iff it cannot cancel: new factor,
                    // or same factor with the touched exponent not opposing the sign.
                    if (!nf.syllables.empty() && nf.syllables.back().factor == g.factor) {
                        const std::int64_t e = nf.syllables.back().exps[static_cast<std::size_t>(g.index)];
                        if ((sign > 0 && e < 0) || (sign < 0 && e > 0)) continue;
                    }
                    NormalForm w = nf;
                    group_model::detail::append_letter(*spec_, w.syllables, gen, sign);
                    next.insert(std::move(w));
                }
            }
        }
        std::vector<NormalForm> sorted(next.begin(), next.end());
        std::sort(sorted.begin(), sorted.end(), [this](const NormalForm& x, const NormalForm& y) {
            return canonical_key(*spec_, x) < canonical_key(*spec_, y);
        });
        shells_.push_back(std::move(sorted));
    }

    const GroupSpec* spec_;
    std::vector<std::vector<NormalForm>> shells_;
};

/** Which metric a Ball was built in. */
enum class Metric { X, Relative };

/**
 * A ball around the identity, stored as one element set per exact distance.
 * Relative balls record the peripheral-exponent truncation they were built
 * with (the relative graph is locally infinite without one).
 */
struct Ball {
    Metric metric = Metric::X;
    int radius = 0;
    int exp_cap = 0;  ///< relative metric only; 0 for X
    std::vector<std::vector<NormalForm>> shells;

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& s : shells) n += s.size();
        return n;
    }
};

/**
 * All elements with x_length <= radius, organized by exact length and sorted
 * canonically within each shell.  `cap` is the safety cap (default 12).
 */
inline Ball ball_X(const GroupSpec& spec, int radius, int cap = 12) {
    if (radius < 0 || radius > cap)
        throw Error(ErrorCode::RadiusExceedsCap,
                    "radius " + std::to_string(radius) + " exceeds cap " + std::to_string(cap));
    Ball ball;
    ball.metric = Metric::X;
    ball.radius = radius;
    ShellEnumerator shells(spec);
    for (int d = 0; d <= radius; ++d) ball.shells.push_back(shells.shell(d));
    return ball;
}

namespace detail {

/** All one-edge moves of the relative graph with peripheral sup-norm <= exp_cap, canonically ordered. */
inline std::vector<EdgeLabel> rel_moves(const GroupSpec& spec, int exp_cap) {
    std::vector<EdgeLabel> moves;
    int base = 0;
    for (int f = 0; f < spec.factor_count(); ++f) {
        const int rank = spec.factors[f].rank;
        if (spec.factors[f].peripheral) {
            std::vector<std::int64_t> e(static_cast<std::size_t>(rank), -exp_cap);
            while (true) {
                bool zero = true;
                for (const auto x : e)
                    if (x != 0) zero = false;
                if (!zero) moves.push_back(EdgeLabel::peripheral_step(f, e));
                int i = rank - 1;
                while (i >= 0 && e[static_cast<std::size_t>(i)] == exp_cap) e[static_cast<std::size_t>(i--)] = -exp_cap;
                if (i < 0) break;
                ++e[static_cast<std::size_t>(i)];
            }
        } else {
            moves.push_back(EdgeLabel::x_step(base, +1));
            moves.push_back(EdgeLabel::x_step(base, -1));
        }
        base += rank;
    }
    return moves;
}

/** Canonical representative of the coset v·H_factor: v with a trailing syllable in `factor` stripped. */
inline NormalForm coset_key(const NormalForm& v, int factor) {
    NormalForm key = v;
    if (!key.syllables.empty() && key.syllables.back().factor == factor) key.syllables.pop_back();
    return key;
}

/**
 * True iff two distinct maximal same-factor peripheral runs of the edge list
 * enter the same left coset (i.e. the path backtracks).
 */
inline bool has_connected_peripheral_runs(const GroupSpec& spec, const Path& p) {
    std::vector<std::pair<int, NormalForm>> runs;  // (factor, coset key)
    int run_factor = -1;
    for (std::size_t k = 0; k < p.edges.size(); ++k) {
        const int f = factor_of(spec, p.edges[k]);
        if (!spec.peripheral(f)) {
            run_factor = -1;
            continue;
        }
        if (f != run_factor) {
            runs.emplace_back(f, coset_key(p.vertices[k], f));
            run_factor = f;
        }
    }
    for (std::size_t i = 0; i < runs.size(); ++i)
        for (std::size_t j = i + 1; j < runs.size(); ++j)
            if (runs[i] == runs[j]) return true;
    return false;
}

}  // namespace detail

/**
 * The relative-metric ball under a peripheral-exponent truncation, by literal
 * layered BFS.  Exact-distance shells, canonically sorted.  The fanout is
 * (2*exp_cap+1)^rank per peripheral factor, so keep radius and cap small; the
 * closed-form dist_rel is the source of truth, this ball is its validator.
 */
inline Ball ball_rel(const GroupSpec& spec, int radius, int exp_cap, int cap = 12) {
    if (radius < 0 || radius > cap)
        throw Error(ErrorCode::RadiusExceedsCap,
                    "radius " + std::to_string(radius) + " exceeds cap " + std::to_string(cap));
    Ball ball;
    ball.metric = Metric::Relative;
    ball.radius = radius;
    ball.exp_cap = exp_cap;
    const auto moves = detail::rel_moves(spec, exp_cap);
    std::unordered_set<NormalForm, NfHash> seen{NormalForm{}};
    ball.shells.push_back({NormalForm{}});
    for (int d = 1; d <= radius; ++d) {
        std::unordered_set<NormalForm, NfHash> next;
        for (const auto& v : ball.shells.back()) {
            for (const auto& m : moves) {
                NormalForm w = multiply(spec, v, element_of(spec, m));
                if (!seen.count(w)) next.insert(std::move(w));
            }
        }
        std::vector<NormalForm> sorted(next.begin(), next.end());
        for (const auto& w : sorted) seen.insert(w);
        std::sort(sorted.begin(), sorted.end(), [&spec](const NormalForm& x, const NormalForm& y) {
            return canonical_key(spec, x) < canonical_key(spec, y);
        });
        ball.shells.push_back(std::move(sorted));
    }
    return ball;
}

/** Result of enumerate_rel_geodesics: the paths found, and whether the count cap truncated the list. */
struct RelGeodesics {
    std::vector<Path> paths;
    bool truncated = false;
};

/**
 * All relative geodesics without backtracking from g to h whose peripheral
 * steps have sup-norm <= exp_cap, by depth-first search over strictly
 * distance-decreasing truncated moves.  Stops (with the truncated flag, a
 * partial list returned) once count_cap paths are collected.  Requires
 * dist_rel(g, h) <= 8.
 */
inline RelGeodesics enumerate_rel_geodesics(const GroupSpec& spec, const NormalForm& g, const NormalForm& h,
                                            int exp_cap, std::size_t count_cap = 1024) {
    const std::uint64_t d = dist_rel(spec, g, h);
    if (d > 8)
        throw Error(ErrorCode::PreconditionViolated,
                    "enumerate_rel_geodesics needs dist_rel <= 8, got " + std::to_string(d));
    RelGeodesics out;
    const auto moves = detail::rel_moves(spec, exp_cap);
    std::vector<EdgeLabel> edges;
    auto dfs = [&](auto&& self, const NormalForm& v, std::uint64_t remaining) -> bool {
        if (remaining == 0) {
            Path p = path_from(spec, g, edges);
            if (!detail::has_connected_peripheral_runs(spec, p)) {
                if (out.paths.size() == count_cap) {
                    out.truncated = true;
                    return false;
                }
                out.paths.push_back(std::move(p));
            }
            return true;
        }
        for (const auto& m : moves) {
            NormalForm w = multiply(spec, v, element_of(spec, m));
            if (dist_rel(spec, w, h) != remaining - 1) continue;
            edges.push_back(m);
            const bool keep_going = self(self, w, remaining - 1);
            edges.pop_back();
            if (!keep_going) return false;
        }
        return true;
    };
    dfs(dfs, g, d);
    return out;
}

}  // namespace relhyp::cayley
