#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <exception>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "relhyp/cayley.hpp"
#include "relhyp/constants.hpp"
#include "relhyp/geometry.hpp"
#include "relhyp/group_model.hpp"
#include "relhyp/util.hpp"

namespace relhyp::csp {

using constants::BoundValue;
using constants::HypConstants;
using group_model::Classification;
using group_model::GroupSpec;
using group_model::NormalForm;
using group_model::equal;
using group_model::invert;
using group_model::multiply;
using group_model::x_length;

/** x^{-1} a x = b, decided by exact normal-form arithmetic. */
inline bool verify_conjugation(const GroupSpec& spec, const NormalForm& a, const NormalForm& x, const NormalForm& b) {
    return equal(multiply(spec, invert(x), multiply(spec, a, x)), b);
}

/**
 * Result of a conjugator search: a verified witness, a definite
 * non-conjugacy verdict (with its grounds), or an honest report that the
 * certified search bound exceeds the enumeration cap.  "Not conjugate" after
 * an exhausted search is claimed only when the full bound radius was scanned.
 */
struct CspOutcome {
    enum class Kind { Found, NotConjugate, BoundExceedsCap };
    enum class Reason { None, ClassificationMismatch, FreeProductCriterion, ExhaustedBound };

    Kind kind = Kind::NotConjugate;
    Reason reason = Reason::None;
    NormalForm x;                      ///< Found only: the verified conjugator
    std::uint64_t x_len = 0;           ///< Found only
    std::uint64_t searched_radius = 0; ///< shells actually scanned
    bool has_bound = false;
    BoundValue bound;                  ///< the certificate ceiling, when one was computed
    std::uint64_t cap = 0;             ///< the enumeration cap in force

    bool found() const { return kind == Kind::Found; }

    static CspOutcome make_found(NormalForm witness, std::uint64_t searched) {
        CspOutcome o;
        o.kind = Kind::Found;
        o.x_len = x_length(witness);
        o.x = std::move(witness);
        o.searched_radius = searched;
        return o;
    }
    static CspOutcome not_conjugate(Reason r) {
        CspOutcome o;
        o.kind = Kind::NotConjugate;
        o.reason = r;
        return o;
    }
};

inline const char* outcome_name(CspOutcome::Kind k) {
    switch (k) {
        case CspOutcome::Kind::Found: return "Found";
        case CspOutcome::Kind::NotConjugate: return "NotConjugate";
        case CspOutcome::Kind::BoundExceedsCap: return "BoundExceedsCap";
    }
    return "?";
}

inline const char* reason_name(CspOutcome::Reason r) {
    switch (r) {
        case CspOutcome::Reason::None: return "none";
        case CspOutcome::Reason::ClassificationMismatch: return "classification-mismatch";
        case CspOutcome::Reason::FreeProductCriterion: return "free-product-criterion";
        case CspOutcome::Reason::ExhaustedBound: return "exhausted-bound";
    }
    return "?";
}

/**
 * Brute-force reference: iterative deepening over ball_X shells in canonical
 * order, so the returned conjugator is the length-minimal one with the
 * deterministic tie-break.  NotConjugate(exhausted-bound) carries the cap it
 * exhausted; it means "no conjugator of length <= cap", nothing stronger.
 */
inline CspOutcome oracle_min_conjugator(const GroupSpec& spec, const NormalForm& a, const NormalForm& b,
                                        std::uint64_t cap) {
    cayley::ShellEnumerator shells(spec);
    for (std::uint64_t r = 0; r <= cap; ++r) {
        for (const auto& x : shells.shell(static_cast<int>(r))) {
            if (verify_conjugation(spec, a, x, b)) {
                CspOutcome o = CspOutcome::make_found(x, r);
                o.cap = cap;
                return o;
            }
        }
    }
    CspOutcome o = CspOutcome::not_conjugate(CspOutcome::Reason::ExhaustedBound);
    o.searched_radius = cap;
    o.cap = cap;
    return o;
}

/**
 * Parabolic route: decide by the free-product conjugacy criterion and
 * assemble the witness from the classification data (a = c_a^{-1} R_a c_a,
 * b = c_b^{-1} R_b c_b; equal abelian representatives give the conjugator
 * c_a^{-1} c_b).  The two routes must agree and the witness must verify;
 * disagreement is an internal error, not an outcome.
 */
inline CspOutcome parabolic_csp(const GroupSpec& spec, const NormalForm& a, const NormalForm& b) {
    const Classification ca = group_model::classify(spec, a);
    const Classification cb = group_model::classify(spec, b);
    if (ca.kind != Classification::Kind::Parabolic || cb.kind != Classification::Kind::Parabolic)
        throw Error(ErrorCode::PreconditionViolated, "parabolic_csp requires two parabolic inputs");

    const auto criterion = group_model::free_product_conjugacy(spec, a, b);
    if (ca.factor != cb.factor || !equal(ca.representative, cb.representative)) {
        if (criterion)
            throw std::logic_error("free-product criterion found a conjugator for distinct parabolic cores");
        return CspOutcome::not_conjugate(CspOutcome::Reason::FreeProductCriterion);
    }
    if (!criterion) throw std::logic_error("free-product criterion missed a conjugator for equal parabolic cores");
    const NormalForm x = multiply(spec, invert(ca.conjugator), cb.conjugator);
    if (!verify_conjugation(spec, a, x, b))
        throw std::logic_error("assembled parabolic conjugator failed verification");
    return CspOutcome::make_found(x, 0);
}

/**
 * The bounded conjugacy search.  Classification mismatch decides instantly;
 * parabolic pairs route through parabolic_csp; hyperbolic pairs scan ball_X
 * shells out to min(bound, cap) where the bound is the hyperbolic-conjugator
 * certificate for L = max{|a|_X, |b|_X}.  A fruitless scan is NotConjugate
 * only if the full bound fit under the cap; otherwise the outcome is
 * BoundExceedsCap, never a non-conjugacy claim.
 */
inline CspOutcome solve_csp(const GroupSpec& spec, const NormalForm& a, const NormalForm& b, const HypConstants& consts,
                            std::uint64_t cap) {
    const Classification ca = group_model::classify(spec, a);
    const Classification cb = group_model::classify(spec, b);
    if (ca.kind != cb.kind) return CspOutcome::not_conjugate(CspOutcome::Reason::ClassificationMismatch);
    if (ca.kind == Classification::Kind::Identity) return CspOutcome::make_found(NormalForm{}, 0);
    if (ca.kind == Classification::Kind::Parabolic) {
        CspOutcome o = parabolic_csp(spec, a, b);
        o.cap = cap;
        return o;
    }

    const std::uint64_t L = std::max(x_length(a), x_length(b));
    const BoundValue bound = constants::bound_hyperbolic(L, consts, spec.x_count());
    const std::uint64_t limit = bound.search_limit(cap);
    cayley::ShellEnumerator shells(spec);
    for (std::uint64_t r = 0; r <= limit; ++r) {
        for (const auto& x : shells.shell(static_cast<int>(r))) {
            if (verify_conjugation(spec, a, x, b)) {
                CspOutcome o = CspOutcome::make_found(x, r);
                o.has_bound = true;
                o.bound = bound;
                o.cap = cap;
                return o;
            }
        }
    }
    CspOutcome o;
    o.kind = bound.exceeds(BigInt(cap)) ? CspOutcome::Kind::BoundExceedsCap : CspOutcome::Kind::NotConjugate;
    if (o.kind == CspOutcome::Kind::NotConjugate) o.reason = CspOutcome::Reason::ExhaustedBound;
    o.searched_radius = limit;
    o.has_bound = true;
    o.bound = bound;
    o.cap = cap;
    return o;
}

/**
 * The closed conjugation rectangle for a verified triple (a, x, b): theta_q
 * walks a relative geodesic word for x from the identity, theta_p walks the
 * identical word from a, and theta_a, theta_b are relative geodesics closing
 * the square (the corners are 1, a, x, ax = xb).  (theta_p, theta_q) is a
 * symmetric pair with characteristic elements g1 = a^{-1}, g2 = b^{-1}.
 */
struct ConjugacyDiagram {
    NormalForm a, b, x;
    cayley::Path theta_a;  ///< 1 -> a
    cayley::Path theta_b;  ///< x -> xb
    cayley::Path theta_p;  ///< a -> ax
    cayley::Path theta_q;  ///< 1 -> x
    geometry::SymmetricPair pair;
};

inline ConjugacyDiagram build_diagram(const GroupSpec& spec, const NormalForm& a, const NormalForm& x,
                                      const NormalForm& b) {
    if (!verify_conjugation(spec, a, x, b))
        throw Error(ErrorCode::NotAConjugator, "x does not conjugate a to b");
    ConjugacyDiagram d;
    d.a = a;
    d.b = b;
    d.x = x;
    d.theta_q = cayley::geodesic_rel(spec, NormalForm{}, x);
    d.theta_p = cayley::path_from(spec, a, d.theta_q.edges);
    d.theta_a = cayley::geodesic_rel(spec, NormalForm{}, a);
    const NormalForm ax = multiply(spec, a, x);
    d.theta_b = cayley::geodesic_rel(spec, x, ax);
    if (!equal(d.theta_p.end(), ax) || !equal(d.theta_b.end(), ax))
        throw std::logic_error("conjugation rectangle failed to close");
    d.pair = geometry::make_symmetric_pair(spec, d.theta_p, d.theta_q);
    if (!equal(d.pair.g1, invert(a)) || !equal(d.pair.g2, invert(b)))
        throw std::logic_error("characteristic elements of the diagram are not a^{-1}, b^{-1}");
    return d;
}

/**
 * Middle-closeness check: every synchronous vertex pair whose position along
 * theta_p is more than L + 2*delta relative units from both endpoints must
 * satisfy dist_rel(u, v) <= 4*delta, with L = max{|a|_X, |b|_X}.  Violations
 * are reported as data.
 */
inline geometry::Report check_lemma_middle(const GroupSpec& spec, const ConjugacyDiagram& d, const Rational& delta,
                                           std::string pair_id = {}) {
    geometry::Report report;
    report.pair_id = std::move(pair_id);
    const std::uint64_t L = std::max(x_length(d.a), x_length(d.b));
    const Rational margin = Rational(L) + 2 * delta;
    const auto sync = geometry::synchronous_pairs(d.pair);
    const std::size_t len = d.theta_p.edges.size();
    for (std::size_t k = 0; k < sync.size(); ++k) {
        if (!(Rational(k) > margin) || !(Rational(len - k) > margin)) continue;
        const std::uint64_t sep = cayley::dist_rel(spec, sync[k].first, sync[k].second);
        if (Rational(sep) > 4 * delta) {
            geometry::Violation v;
            v.kind = "middle-vertex-separation";
            v.indices = {k};
            v.details = "relative distance " + std::to_string(sep) + " exceeds 4*delta at offset " + std::to_string(k);
            report.violations.push_back(std::move(v));
        }
    }
    return report;
}

/**
 * Component-span check: every peripheral component of theta_p and theta_q
 * must have Gamma-length at most eps(L) for hyperbolic inputs, or at most
 * M(L) = max{eps(L), P(eps(L))} for parabolic inputs.
 */
inline geometry::Report check_component_bounds(const GroupSpec& spec, const ConjugacyDiagram& d,
                                               const HypConstants& consts, std::string pair_id = {}) {
    geometry::Report report;
    report.pair_id = std::move(pair_id);
    const std::uint64_t L = std::max(x_length(d.a), x_length(d.b));
    const bool parabolic = group_model::classify(spec, d.a).kind == Classification::Kind::Parabolic;
    const Rational threshold = parabolic ? constants::eval_m(consts, Rational(L)) : constants::eval_epsilon(consts, Rational(L));
    const auto scan = [&](const cayley::Path& path, const char* name) {
        const auto comps = geometry::decompose(spec, path);
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const std::uint64_t span = x_length(comps[i].label);
            if (Rational(span) > threshold) {
                geometry::Violation v;
                v.kind = "component-span-exceeds-bound";
                v.indices = {i};
                v.details = std::string(name) + " component spans " + std::to_string(span) +
                            " in Gamma, over the threshold";
                report.violations.push_back(std::move(v));
            }
        }
    };
    scan(d.theta_p, "theta_p");
    scan(d.theta_q, "theta_q");
    return report;
}

/** One planted-conjugator trial: inputs, search results, and lemma-check counts. */
struct ExperimentRecord {
    std::uint64_t trial = 0;
    std::uint64_t L = 0;
    std::uint64_t x_planted_len = 0;
    std::uint64_t x_min_len = 0;
    std::string bound;
    std::string classification;
    std::uint64_t middle_violations = 0;
    std::uint64_t component_violations = 0;
    std::uint64_t millis = 0;
};

struct ExperimentResult {
    std::vector<ExperimentRecord> records;

    std::string to_csv() const {
        std::ostringstream out;
        out << "trial,L,x_planted_len,x_min_len,bound,class,middle_violations,component_violations,millis\n";
        for (const auto& r : records)
            out << r.trial << ',' << r.L << ',' << r.x_planted_len << ',' << r.x_min_len << ',' << r.bound << ','
                << r.classification << ',' << r.middle_violations << ',' << r.component_violations << ',' << r.millis
                << '\n';
        return out.str();
    }

    /** Per-L maxima/means of the minimal conjugator length plus violation totals. */
    std::string summary() const {
        std::ostringstream out;
        std::uint64_t middle = 0, comp = 0;
        std::vector<std::uint64_t> max_len, count, sum_len;
        for (const auto& r : records) {
            middle += r.middle_violations;
            comp += r.component_violations;
            if (r.L >= max_len.size()) {
                max_len.resize(r.L + 1, 0);
                count.resize(r.L + 1, 0);
                sum_len.resize(r.L + 1, 0);
            }
            max_len[r.L] = std::max(max_len[r.L], r.x_min_len);
            sum_len[r.L] += r.x_min_len;
            ++count[r.L];
        }
        out << "trials " << records.size() << "\n";
        out << "middle_violations_total " << middle << "\n";
        out << "component_violations_total " << comp << "\n";
        for (std::size_t l = 0; l < count.size(); ++l) {
            if (count[l] == 0) continue;
            out << "L " << l << " trials " << count[l] << " max_x_min " << max_len[l] << " mean_x_min "
                << rational_to_string(Rational(sum_len[l]) / Rational(count[l])) << "\n";
        }
        return out.str();
    }
};

namespace detail {

inline NormalForm random_element(const GroupSpec& spec, Rng& rng, std::uint64_t max_len) {
    NormalForm nf;
    const std::uint64_t len = rng.uniform(max_len + 1);
    for (std::uint64_t i = 0; i < len; ++i)
        group_model::detail::append_letter(spec, nf.syllables,
                                           static_cast<int>(rng.uniform(static_cast<std::uint64_t>(spec.total_rank()))),
                                           rng.uniform(2) ? +1 : -1);
    return nf;
}

}  // namespace detail

/**
 * Seeded planted-conjugator harness: per trial, draw a with |a|_X <= L_max
 * and x with |x|_X <= cap/2, set b = nf(x^{-1} a x), then run the oracle,
 * the solver, and both lemma checks on the minimal diagram.  Each trial is
 * seeded by Rng::mix(seed, trial), so the records do not depend on worker
 * count or scheduling; `millis` is recorded only when timing is requested
 * (fixture comparisons need byte-stable output).
 */
inline ExperimentResult experiment_growth(const GroupSpec& spec, const HypConstants& consts, std::uint64_t trials,
                                          std::uint64_t l_max, std::uint64_t seed, std::uint64_t cap, int workers = 1,
                                          bool timing = false) {
    if (workers < 1) throw Error(ErrorCode::ConfigError, "workers must be >= 1");
    ExperimentResult result;
    result.records.resize(trials);

    const auto run_trial = [&](std::uint64_t t) {
        const auto started = std::chrono::steady_clock::now();
        Rng rng(Rng::mix(seed, t));
        const NormalForm a = detail::random_element(spec, rng, l_max);
        const NormalForm planted = detail::random_element(spec, rng, cap / 2);
        const NormalForm b = multiply(spec, invert(planted), multiply(spec, a, planted));

        const CspOutcome oracle = oracle_min_conjugator(spec, a, b, cap);
        if (!oracle.found()) throw std::logic_error("planted conjugator not found within the cap");
        const CspOutcome solved = solve_csp(spec, a, b, consts, cap);
        if (!solved.found())
            throw Error(ErrorCode::PreconditionViolated,
                        std::string("solver returned ") + outcome_name(solved.kind) + " on planted trial " +
                            std::to_string(t) + "; the constants give a search bound too small for l_max " +
                            std::to_string(l_max) + " (searched " + std::to_string(solved.searched_radius) + ")");
        if (solved.x_len != oracle.x_len)
            throw std::logic_error("solver disagreed with the oracle on a planted trial");

        ExperimentRecord rec;
        rec.trial = t;
        rec.L = std::max(x_length(a), x_length(b));
        rec.x_planted_len = x_length(planted);
        rec.x_min_len = oracle.x_len;
        const Classification cls = group_model::classify(spec, a);
        rec.classification = group_model::classification_name(cls.kind);
        switch (cls.kind) {
            case Classification::Kind::Identity: rec.bound = "0"; break;
            case Classification::Kind::Parabolic:
                rec.bound = constants::bound_parabolic(rec.L, consts, spec.x_count()).to_string();
                break;
            case Classification::Kind::Hyperbolic:
                rec.bound = constants::bound_hyperbolic(rec.L, consts, spec.x_count()).to_string();
                break;
        }
        const ConjugacyDiagram diagram = build_diagram(spec, a, oracle.x, b);
        rec.middle_violations = check_lemma_middle(spec, diagram, consts.delta).violations.size();
        rec.component_violations = check_component_bounds(spec, diagram, consts).violations.size();
        if (timing)
            rec.millis = static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started)
                    .count());
        result.records[t] = std::move(rec);
    };

    if (workers == 1) {
        for (std::uint64_t t = 0; t < trials; ++t) run_trial(t);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::uint64_t t = static_cast<std::uint64_t>(w); t < trials; t += static_cast<std::uint64_t>(workers))
                        run_trial(t);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }
    return result;
}

}  // namespace relhyp::csp
