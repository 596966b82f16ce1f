#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relhyp/cayley.hpp"
#include "relhyp/geometry.hpp"
#include "relhyp/group_model.hpp"
#include "relhyp/util.hpp"

namespace relhyp::constants {

using group_model::GroupSpec;
using group_model::NormalForm;
using group_model::multiply;
using group_model::rel_length;

/** Where a constant came from: a measurement run (with its parameters) or configuration. */
struct Provenance {
    bool measured = false;
    int radius = 0;   ///< measurement ball radius (measured only)
    int exp_cap = 0;  ///< peripheral-exponent truncation (measured only)

    static Provenance configured() { return {}; }
    static Provenance from_run(int radius, int exp_cap) { return {true, radius, exp_cap}; }

    bool operator==(const Provenance&) const = default;
};

/**
 * Everything the bound formulas consume: the hyperbolicity constant delta of
 * the relative graph, the quadratic neighbourhood function eps(k) = e0 + e1*k
 * + e2*k^2, the coset-penetration constant c(1), the multiplicative constant
 * ML > 1, and the peripheral conjugacy-search polynomial P (coefficient list,
 * constant term first; empty means identically zero).
 */
struct HypConstants {
    Rational delta = 0;
    Rational e0 = 0, e1 = 0, e2 = 0;
    Rational c_bcp = 0;
    Rational ml = 2;
    std::vector<Rational> peripheral_poly;

    Provenance delta_prov, eps_prov, bcp_prov, ml_prov, poly_prov;

    void validate() const {
        if (!(ml > 1)) throw Error(ErrorCode::ConfigError, "ML must be > 1");
        for (const auto& v : {delta, e0, e1, e2, c_bcp})
            if (v < 0) throw Error(ErrorCode::ConfigError, "constants must be non-negative");
        for (const auto& v : peripheral_poly)
            if (v < 0) throw Error(ErrorCode::ConfigError, "peripheral polynomial coefficients must be non-negative");
    }
};

/** eps(k) = e0 + e1*k + e2*k^2 (monotone on naturals: coefficients are non-negative). */
inline Rational eval_epsilon(const HypConstants& c, const Rational& k) { return c.e0 + c.e1 * k + c.e2 * k * k; }

/** Evaluate a coefficient list (constant term first) by Horner's rule. */
inline Rational eval_poly(const std::vector<Rational>& coeffs, const Rational& y) {
    Rational v = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * y + *it;
    return v;
}

/** M(L) = max{ eps(L), P(eps(L)) }: the parabolic coset-travel bound. */
inline Rational eval_m(const HypConstants& c, const Rational& L) {
    const Rational eps = eval_epsilon(c, L);
    return std::max(eps, eval_poly(c.peripheral_poly, eps));
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

/**
 * Maximum four-point-condition defect over all vertex quadruples of the
 * truncated relative ball: for each quadruple the three pairings of opposite
 * sides give sums s1, s2, s3, and the defect is (largest - second largest)/2.
 * Distances are the exact closed-form dist_rel; the truncated ball only
 * selects the vertex domain.  Deterministic, exhaustive, O(n^4) quadruples.
 */
inline Rational estimate_delta(const GroupSpec& spec, int radius, int exp_cap) {
    std::vector<NormalForm> domain;
    {
        const cayley::Ball ball = cayley::ball_rel(spec, radius, exp_cap);
        for (const auto& shell : ball.shells) domain.insert(domain.end(), shell.begin(), shell.end());
    }
    const std::size_t n = domain.size();
    std::vector<std::uint8_t> dist(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::uint64_t d = cayley::dist_rel(spec, domain[i], domain[j]);
            if (d > 255) throw Error(ErrorCode::PreconditionViolated, "distance matrix overflow");
            dist[i * n + j] = static_cast<std::uint8_t>(d);
        }

    std::uint8_t best2 = 0;  // twice the defect; bounded by 2*diameter
    for (std::size_t w = 0; w < n; ++w) {
        const std::uint8_t* dw = dist.data() + w * n;
        for (std::size_t x = w + 1; x < n; ++x) {
            const std::uint8_t* dx = dist.data() + x * n;
            const std::uint8_t c_wx = dw[x];
            for (std::size_t y = x + 1; y < n; ++y) {
                const std::uint8_t* dy = dist.data() + y * n;
                const std::uint8_t c_wy = dw[y];
                const std::uint8_t c_xy = dx[y];
                std::uint8_t row_best = 0;
                for (std::size_t z = y + 1; z < n; ++z) {
                    // defect*2 = 2*max + min - (s1+s2+s3) = max - median
                    const std::uint8_t s1 = static_cast<std::uint8_t>(c_wx + dy[z]);
                    const std::uint8_t s2 = static_cast<std::uint8_t>(c_wy + dx[z]);
                    const std::uint8_t s3 = static_cast<std::uint8_t>(c_xy + dw[z]);
                    const std::uint8_t hi = std::max(s1, std::max(s2, s3));
                    const std::uint8_t lo = std::min(s1, std::min(s2, s3));
                    const std::uint8_t d2 = static_cast<std::uint8_t>(2 * hi + lo - (s1 + s2 + s3));
                    row_best = std::max(row_best, d2);
                }
                best2 = std::max(best2, row_best);
            }
        }
    }
    return Rational(best2) / 2;
}

namespace detail {

/** max over phase vertices of p of the Gamma-distance to the nearest phase vertex of q, symmetrized. */
inline std::uint64_t phase_separation(const GroupSpec& spec, const cayley::Path& p, const cayley::Path& q) {
    const auto pp = geometry::phase_vertices(spec, p);
    const auto pq = geometry::phase_vertices(spec, q);
    std::uint64_t worst = 0;
    const auto one_way = [&](const cayley::Path& a, const std::vector<std::size_t>& ia, const cayley::Path& b,
                             const std::vector<std::size_t>& ib) {
        for (const auto i : ia) {
            std::uint64_t nearest = UINT64_MAX;
            for (const auto j : ib) nearest = std::min(nearest, cayley::dist_X(spec, a.vertices[i], b.vertices[j]));
            worst = std::max(worst, nearest);
        }
    };
    one_way(p, pp, q, pq);
    one_way(q, pq, p, pp);
    return worst;
}

}  // namespace detail

/**
 * Empirical eps(k): the largest phase-vertex separation observed over
 * k-similar pairs of relative geodesics without backtracking.  Scans a
 * deterministic witness family (peripheral offsets split across the two
 * endpoints) plus a fixed-seed random stratum of endpoint perturbations;
 * deterministic for fixed (spec, k, radius).
 */
inline Rational estimate_epsilon(const GroupSpec& spec, int k, int radius) {
    std::uint64_t best = 0;
    const auto consider = [&](const NormalForm& p_start, const NormalForm& p_end, const NormalForm& q_start,
                              const NormalForm& q_end) {
        const cayley::Path p = cayley::geodesic_rel(spec, p_start, p_end);
        const cayley::Path q = cayley::geodesic_rel(spec, q_start, q_end);
        best = std::max(best, detail::phase_separation(spec, p, q));
    };

    // Witness family: connect through one letter of another factor, with the
    // peripheral offset h = x_i^k split as x_i^a at the start and x_i^(k-a)
    // at the end (both endpoint gaps stay <= k, so the pair is k-similar).
    for (int i = 0; i < spec.factor_count(); ++i) {
        if (!spec.factors[i].peripheral) continue;
        for (int j = 0; j < spec.factor_count(); ++j) {
            if (j == i) continue;
            NormalForm conn;
            std::vector<std::int64_t> e(static_cast<std::size_t>(spec.factors[j].rank), 0);
            e[0] = 1;
            group_model::detail::append_syllable(conn.syllables, j, e);
            for (int a = 0; a <= k; ++a) {
                NormalForm h1, h2;
                std::vector<std::int64_t> v1(static_cast<std::size_t>(spec.factors[i].rank), 0);
                v1[0] = a;
                group_model::detail::append_syllable(h1.syllables, i, v1);
                std::vector<std::int64_t> v2(static_cast<std::size_t>(spec.factors[i].rank), 0);
                v2[0] = k - a;
                group_model::detail::append_syllable(h2.syllables, i, v2);
                consider(NormalForm{}, conn, h1, multiply(spec, conn, h2));
            }
        }
    }

    // Fixed-seed random stratum: arbitrary targets, arbitrary <= k endpoint offsets.
    Rng rng(Rng::mix(0x45505330ULL, static_cast<std::uint64_t>(k) * 131 + static_cast<std::uint64_t>(radius)));
    const auto random_element = [&](std::uint64_t max_len) {
        NormalForm nf;
        const std::uint64_t len = rng.uniform(max_len + 1);
        for (std::uint64_t i = 0; i < len; ++i)
            group_model::detail::append_letter(spec, nf.syllables,
                                               static_cast<int>(rng.uniform(static_cast<std::uint64_t>(spec.total_rank()))),
                                               rng.uniform(2) ? +1 : -1);
        return nf;
    };
    for (int trial = 0; trial < 48; ++trial) {
        const NormalForm g = random_element(static_cast<std::uint64_t>(radius));
        const NormalForm h1 = random_element(static_cast<std::uint64_t>(k));
        const NormalForm h2 = random_element(static_cast<std::uint64_t>(k));
        consider(NormalForm{}, g, h1, multiply(spec, g, h2));
    }
    return Rational(best);
}

/** Least-squares fit of eps(k) = e0 + e1*k + e2*k^2 over measured maxima. */
struct EpsFit {
    Rational e0 = 0, e1 = 0, e2 = 0;
    Rational residual = 0;  ///< sum of squared errors
};

/**
 * Exact-rational least squares over the 8 subsets of {e0, e1, e2} (inactive
 * coefficients pinned to zero), keeping the best-residual solution whose
 * coefficients are all non-negative.  Ties prefer fewer active terms, then
 * the lexicographically smaller coefficient triple; fully deterministic.
 */
inline EpsFit fit_eps_coeffs(const std::vector<std::pair<std::uint64_t, Rational>>& samples) {
    if (samples.empty()) throw Error(ErrorCode::PreconditionViolated, "fit needs at least one sample");
    std::optional<EpsFit> best;
    int best_terms = 4;
    for (int mask = 0; mask < 8; ++mask) {
        std::vector<int> active;
        for (int t = 0; t < 3; ++t)
            if (mask & (1 << t)) active.push_back(t);
        const std::size_t m = active.size();
        // Normal equations A^T A c = A^T y with basis k^t for active t.
        std::vector<std::vector<Rational>> ata(m, std::vector<Rational>(m, 0));
        std::vector<Rational> aty(m, 0);
        for (const auto& [k, y] : samples) {
            std::vector<Rational> row(m);
            for (std::size_t i = 0; i < m; ++i) {
                Rational p = 1;
                for (int t = 0; t < active[i]; ++t) p *= Rational(k);
                row[i] = p;
            }
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) ata[i][j] += row[i] * row[j];
                aty[i] += row[i] * y;
            }
        }
        // Gaussian elimination over exact rationals.
        std::vector<Rational> coeff(m, 0);
        bool singular = false;
        {
            std::vector<std::vector<Rational>> aug = ata;
            for (std::size_t i = 0; i < m; ++i) aug[i].push_back(aty[i]);
            for (std::size_t col = 0; col < m && !singular; ++col) {
                std::size_t pivot = col;
                while (pivot < m && aug[pivot][col] == 0) ++pivot;
                if (pivot == m) {
                    singular = true;
                    break;
                }
                std::swap(aug[col], aug[pivot]);
                for (std::size_t r = 0; r < m; ++r) {
                    if (r == col || aug[r][col] == 0) continue;
                    const Rational f = aug[r][col] / aug[col][col];
                    for (std::size_t c2 = col; c2 <= m; ++c2) aug[r][c2] -= f * aug[col][c2];
                }
            }
            if (!singular)
                for (std::size_t i = 0; i < m; ++i) coeff[i] = aug[i][m] / aug[i][i];
        }
        if (singular) continue;
        EpsFit fit;
        bool nonneg = true;
        for (std::size_t i = 0; i < m; ++i) {
            if (coeff[i] < 0) nonneg = false;
            if (active[i] == 0) fit.e0 = coeff[i];
            if (active[i] == 1) fit.e1 = coeff[i];
            if (active[i] == 2) fit.e2 = coeff[i];
        }
        if (!nonneg) continue;
        Rational res = 0;
        for (const auto& [k, y] : samples) {
            const Rational pred = fit.e0 + fit.e1 * Rational(k) + fit.e2 * Rational(k) * Rational(k);
            res += (pred - y) * (pred - y);
        }
        fit.residual = res;
        const int terms = static_cast<int>(m);
        const auto better = [&]() {
            if (!best) return true;
            if (res != best->residual) return res < best->residual;
            if (terms != best_terms) return terms < best_terms;
            return std::tie(fit.e0, fit.e1, fit.e2) < std::tie(best->e0, best->e1, best->e2);
        };
        if (better()) {
            best = fit;
            best_terms = terms;
        }
    }
    if (!best) throw Error(ErrorCode::PreconditionViolated, "least-squares system singular for every subset");
    return *best;
}

namespace detail {

/** Exact element count of the truncated relative ball, by the pattern recurrence. */
inline BigInt rel_ball_count(const GroupSpec& spec, int radius, int exp_cap) {
    const int nf = spec.factor_count();
    std::vector<std::vector<BigInt>> ways(static_cast<std::size_t>(radius) + 1,
                                          std::vector<BigInt>(static_cast<std::size_t>(nf) + 1, 0));
    for (int last = -1; last < nf; ++last) ways[0][static_cast<std::size_t>(last + 1)] = 1;
    for (int b = 1; b <= radius; ++b) {
        for (int last = -1; last < nf; ++last) {
            BigInt total = 0;
            for (int f = 0; f < nf; ++f) {
                if (f == last) continue;
                if (spec.factors[f].peripheral) {
                    BigInt cnt = 1;
                    for (int r = 0; r < spec.factors[f].rank; ++r) cnt *= 2 * exp_cap + 1;
                    total += (cnt - 1) * ways[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(f + 1)];
                } else {
                    for (int len = 1; len <= b; ++len)
                        total += 2 * ways[static_cast<std::size_t>(b - len)][static_cast<std::size_t>(f + 1)];
                }
            }
            ways[static_cast<std::size_t>(b)][static_cast<std::size_t>(last + 1)] = total;
        }
    }
    BigInt ball = 0;
    for (int d = 0; d <= radius; ++d) ball += ways[static_cast<std::size_t>(d)][0];
    return ball;
}

/**
 * Walk the geodesic tree of the truncated relative graph, counting nodes.
 * Children extend a geodesic from the identity by one strictly
 * distance-increasing move; the structural move generator is verified against
 * a literal all-moves scan at every shallow node and at sampled deep nodes.
 */
class GeodesicTreeWalker {
  public:
    GeodesicTreeWalker(const GroupSpec& spec, int radius, int exp_cap)
        : spec_(&spec), radius_(radius), exp_cap_(exp_cap), moves_(cayley::detail::rel_moves(spec, exp_cap)) {}

    std::uint64_t count() {
        v_ = NormalForm{};
        // Each move appends at most one syllable; reserving up front keeps
        // references into the syllable vector stable across recursion.
        v_.syllables.reserve(static_cast<std::size_t>(radius_) + 1);
        nodes_ = 0;
        walk(radius_);
        return nodes_;
    }

  private:
    void walk(int remaining) {
        ++nodes_;
        const int depth = radius_ - remaining;
        if (depth <= 1 || (nodes_ & 0xFFFFFULL) == 0) literal_check();
        if (remaining == 0) return;
        const int lf = v_.syllables.empty() ? -1 : v_.syllables.back().factor;
        for (int f = 0; f < spec_->factor_count(); ++f) {
            const int rank = spec_->factors[f].rank;
            if (spec_->factors[f].peripheral) {
                if (f == lf) continue;  // merging into the last coset never lengthens
                v_.syllables.push_back({f, std::vector<std::int64_t>(static_cast<std::size_t>(rank), -exp_cap_)});
                auto& e = v_.syllables.back().exps;
                while (true) {
                    bool zero = true;
                    for (const auto x : e)
                        if (x != 0) zero = false;
                    if (!zero) walk(remaining - 1);
                    int i = rank - 1;
                    while (i >= 0 && e[static_cast<std::size_t>(i)] == exp_cap_) e[static_cast<std::size_t>(i--)] = -exp_cap_;
                    if (i < 0) break;
                    ++e[static_cast<std::size_t>(i)];
                }
                v_.syllables.pop_back();
            } else if (f != lf) {
                for (const std::int64_t sign : {+1, -1}) {
                    v_.syllables.push_back({f, {sign}});
                    walk(remaining - 1);
                    v_.syllables.pop_back();
                }
            } else {
                // same non-peripheral factor: only the sign-extending letter
                auto& e = v_.syllables.back().exps[0];
                const std::int64_t sign = e < 0 ? -1 : +1;
                e += sign;
                walk(remaining - 1);
                e -= sign;
            }
        }
    }

    /** The structural children must be exactly the distance-increasing literal moves. */
    void literal_check() {
        const std::uint64_t here = rel_length(*spec_, v_);
        std::uint64_t expected = 0;
        const int lf = v_.syllables.empty() ? -1 : v_.syllables.back().factor;
        for (int f = 0; f < spec_->factor_count(); ++f) {
            if (spec_->factors[f].peripheral) {
                if (f == lf) continue;
                BigInt cnt = 1;
                for (int r = 0; r < spec_->factors[f].rank; ++r) cnt *= 2 * exp_cap_ + 1;
                expected += (cnt - 1).convert_to<std::uint64_t>();
            } else {
                expected += f != lf ? 2 : 1;
            }
        }
        std::uint64_t literal = 0;
        for (const auto& m : moves_) {
            const NormalForm w = multiply(*spec_, v_, cayley::element_of(*spec_, m));
            if (rel_length(*spec_, w) == here + 1) ++literal;
        }
        if (literal != expected)
            throw std::logic_error("geodesic-tree move generator disagrees with the literal move scan");
    }

    const GroupSpec* spec_;
    int radius_;
    int exp_cap_;
    std::vector<cayley::EdgeLabel> moves_;
    NormalForm v_;
    std::uint64_t nodes_ = 0;
};

}  // namespace detail

/**
 * Empirical BCP constant for geodesics (lambda = 1): over endpoint-sharing
 * pairs of relative geodesics without backtracking in the truncated ball, the
 * larger of (a) the worst entry/exit Gamma-discrepancy in cosets both paths
 * penetrate and (b) the worst Gamma-distance travelled in a coset only one
 * path penetrates.
 *
 * First the geodesic tree of the ball is counted against the exact element
 * count; equality certifies that relative geodesics are unique, every
 * endpoint-sharing pair is two copies of the same path, and the measured
 * value is exactly 0.  If the counts differ the pairs are enumerated and
 * measured directly (only feasible for small balls).
 */
inline Rational estimate_bcp(const GroupSpec& spec, int radius, int exp_cap) {
    const BigInt n_ball = detail::rel_ball_count(spec, radius, exp_cap);
    if (n_ball > BigInt(2000000000))
        throw Error(ErrorCode::SearchCapExceeded, "truncated ball too large to certify: " + n_ball.str());
    detail::GeodesicTreeWalker walker(spec, radius, exp_cap);
    const std::uint64_t n_tree = walker.count();
    if (BigInt(n_tree) == n_ball) return 0;

    // Non-unique geodesics: measure penetration discrepancies directly.
    if (n_ball > BigInt(200000))
        throw Error(ErrorCode::SearchCapExceeded, "pairwise penetration scan infeasible at this radius");
    std::uint64_t worst = 0;
    const cayley::Ball ball = cayley::ball_rel(spec, radius, exp_cap);
    for (const auto& shell : ball.shells) {
        for (const auto& h : shell) {
            if (cayley::dist_rel(spec, NormalForm{}, h) > 8) continue;
            const auto geos = cayley::enumerate_rel_geodesics(spec, NormalForm{}, h, exp_cap, 4096);
            for (std::size_t i = 0; i < geos.paths.size(); ++i) {
                for (std::size_t j = i + 1; j < geos.paths.size(); ++j) {
                    const auto cp = geometry::decompose(spec, geos.paths[i]);
                    const auto cq = geometry::decompose(spec, geos.paths[j]);
                    std::vector<bool> matched(cq.size(), false);
                    for (const auto& a : cp) {
                        bool shared = false;
                        for (std::size_t t = 0; t < cq.size(); ++t) {
                            const auto& b = cq[t];
                            if (a.factor != b.factor || !geometry::connected(spec, a, b)) continue;
                            shared = true;
                            matched[t] = true;
                            worst = std::max(worst, cayley::dist_X(spec, a.start_vertex, b.start_vertex));
                            worst = std::max(worst, cayley::dist_X(spec, a.end_vertex, b.end_vertex));
                        }
                        if (!shared) worst = std::max(worst, group_model::x_length(a.label));
                    }
                    for (std::size_t t = 0; t < cq.size(); ++t)
                        if (!matched[t]) worst = std::max(worst, group_model::x_length(cq[t].label));
                }
            }
        }
    }
    return Rational(worst);
}

// ---------------------------------------------------------------------------
// Bound formulas
// ---------------------------------------------------------------------------

/**
 * An exactly evaluated bound 2(...)(...) + |X|^E.  The exponent E is rounded
 * up to an integer (upper bounds must stay upper bounds); the power is
 * expanded whenever E <= 100000, otherwise the value stays symbolic (linear
 * part + base^exponent).  Magnitude checks against an enumeration cap work in
 * both forms.
 */
struct BoundValue {
    Rational linear = 0;   ///< the 2(...)(...) part, exact
    BigInt base = 0;       ///< |X|
    BigInt exponent = 0;   ///< ceil(6 * ML * (16*delta)^2)
    bool expanded = false;
    BigInt power = 0;      ///< base^exponent when expanded

    /** The bound as an exact rational (requires the expanded form). */
    Rational exact_total() const {
        if (!expanded) throw Error(ErrorCode::PreconditionViolated, "bound too large to expand");
        return linear + Rational(power);
    }

    /** Least integer >= the bound (requires the expanded form). */
    BigInt ceil_value() const { return ceil_rational(exact_total()); }

    /** Exact comparison against an enumeration cap; works in symbolic form too. */
    bool exceeds(const BigInt& cap) const {
        if (expanded) return ceil_value() > cap;
        // Symbolic: base >= 2 and exponent > 100000, so the power alone tops
        // 2^100000; compare bit lengths exactly.
        if (cap <= 0) return true;
        return exponent > BigInt(boost::multiprecision::msb(cap)) ;
    }

    /** Shell radius to search: min(bound, cap) for a machine-sized cap. */
    std::uint64_t search_limit(std::uint64_t cap) const {
        if (!expanded) return cap;
        const BigInt v = ceil_value();
        return v > BigInt(cap) ? cap : v.convert_to<std::uint64_t>();
    }

    std::string to_string() const {
        if (expanded) return ceil_value().str();
        return rational_to_string(linear) + " + " + base.str() + "^" + exponent.str();
    }
};

namespace detail {

inline BoundValue make_bound(const Rational& linear, const HypConstants& c, int x_count) {
    c.validate();
    BoundValue b;
    b.linear = linear;
    b.base = x_count;
    const Rational e = 6 * c.ml * (16 * c.delta) * (16 * c.delta);
    b.exponent = ceil_rational(e);
    if (b.exponent <= 100000) {
        b.expanded = true;
        b.power = boost::multiprecision::pow(b.base, b.exponent.convert_to<unsigned>());
    }
    return b;
}

}  // namespace detail

/** 2(L + 34*delta) + |X|^(6*ML*(16*delta)^2): the relative-length bound. */
inline BoundValue bound_relative(std::uint64_t L, const HypConstants& c, int x_count) {
    return detail::make_bound(2 * (Rational(L) + 34 * c.delta), c, x_count);
}

/** 2(34*delta + L)*eps(L) + |X|^(6*ML*(16*delta)^2): the hyperbolic conjugator bound. */
inline BoundValue bound_hyperbolic(std::uint64_t L, const HypConstants& c, int x_count) {
    return detail::make_bound(2 * (34 * c.delta + Rational(L)) * eval_epsilon(c, Rational(L)), c, x_count);
}

/** 2(34*delta + L)*M(L) + |X|^(6*ML*(16*delta)^2) with M(L) = max{eps(L), P(eps(L))}. */
inline BoundValue bound_parabolic(std::uint64_t L, const HypConstants& c, int x_count) {
    return detail::make_bound(2 * (34 * c.delta + Rational(L)) * eval_m(c, Rational(L)), c, x_count);
}

// ---------------------------------------------------------------------------
// Fixture IO
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json provenance_to_json(const Provenance& p) {
    if (!p.measured) return {{"kind", "configured"}};
    return {{"kind", "measured"}, {"radius", p.radius}, {"exp_cap", p.exp_cap}};
}

inline Provenance provenance_from_json(const nlohmann::json& j) {
    Provenance p;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "configured") return p;
    if (kind != "measured") throw Error(ErrorCode::ConfigError, "provenance kind must be measured|configured");
    p.measured = true;
    p.radius = j.at("radius").get<int>();
    p.exp_cap = j.at("exp_cap").get<int>();
    return p;
}

}  // namespace detail

inline std::string constants_to_json(const HypConstants& c) {
    nlohmann::ordered_json doc;
    doc["delta"] = rational_to_string(c.delta);
    doc["eps_coeffs"] = {rational_to_string(c.e0), rational_to_string(c.e1), rational_to_string(c.e2)};
    doc["c_bcp"] = rational_to_string(c.c_bcp);
    doc["ml"] = rational_to_string(c.ml);
    doc["peripheral_poly"] = nlohmann::ordered_json::array();
    for (const auto& v : c.peripheral_poly) doc["peripheral_poly"].push_back(rational_to_string(v));
    doc["provenance"] = {{"delta", detail::provenance_to_json(c.delta_prov)},
                         {"eps", detail::provenance_to_json(c.eps_prov)},
                         {"c_bcp", detail::provenance_to_json(c.bcp_prov)},
                         {"ml", detail::provenance_to_json(c.ml_prov)},
                         {"peripheral_poly", detail::provenance_to_json(c.poly_prov)}};
    return doc.dump(2);
}

inline HypConstants constants_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("constants file is not valid JSON: ") + e.what());
    }
    HypConstants c;
    try {
        c.delta = rational_from_string(doc.at("delta").get<std::string>());
        const auto eps = doc.at("eps_coeffs");
        c.e0 = rational_from_string(eps.at(0).get<std::string>());
        c.e1 = rational_from_string(eps.at(1).get<std::string>());
        c.e2 = rational_from_string(eps.at(2).get<std::string>());
        c.c_bcp = rational_from_string(doc.at("c_bcp").get<std::string>());
        c.ml = rational_from_string(doc.at("ml").get<std::string>());
        c.peripheral_poly.clear();
        for (const auto& v : doc.at("peripheral_poly")) c.peripheral_poly.push_back(rational_from_string(v.get<std::string>()));
        if (doc.contains("provenance")) {
            const auto& p = doc["provenance"];
            c.delta_prov = detail::provenance_from_json(p.at("delta"));
            c.eps_prov = detail::provenance_from_json(p.at("eps"));
            c.bcp_prov = detail::provenance_from_json(p.at("c_bcp"));
            c.ml_prov = detail::provenance_from_json(p.at("ml"));
            c.poly_prov = detail::provenance_from_json(p.at("peripheral_poly"));
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("bad constants document: ") + e.what());
    }
    c.validate();
    return c;
}

inline HypConstants load_constants(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open constants file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return constants_from_json(buf.str());
}

}  // namespace relhyp::constants
