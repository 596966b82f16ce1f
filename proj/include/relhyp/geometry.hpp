#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relhyp/cayley.hpp"
#include "relhyp/group_model.hpp"
#include "relhyp/util.hpp"

namespace relhyp::geometry {

using cayley::EdgeLabel;
using cayley::Path;
using group_model::GroupSpec;
using group_model::NormalForm;
using group_model::invert;
using group_model::multiply;
using group_model::rel_length;

/**
 * A maximal peripheral-factor subpath: a contiguous run of edges whose
 * elements all lie in the same peripheral subgroup H_i, not contained in a
 * larger such run.  Indices refer to the path's vertex list (the run spans
 * edges [start_index, end_index)); the start/end vertices are cached so a
 * component can be compared across paths on its own.
 */
struct Component {
    int factor = -1;
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    NormalForm start_vertex;
    NormalForm end_vertex;
    NormalForm label;  ///< start^-1 * end, an element of H_factor

    bool operator==(const Component&) const = default;
};

/**
 * All maximal H_i-components of a path, in path order.  Only peripheral
 * factors form components; letters of non-peripheral factors are ordinary
 * edges.  Both XStep and PeripheralStep edges count — a component is about
 * which subgroup the edge elements lie in, not the edge encoding.
 */
inline std::vector<Component> decompose(const GroupSpec& spec, const Path& p) {
    std::vector<Component> out;
    std::size_t k = 0;
    while (k < p.edges.size()) {
        const int f = cayley::factor_of(spec, p.edges[k]);
        if (!spec.peripheral(f)) {
            ++k;
            continue;
        }
        std::size_t end = k + 1;
        while (end < p.edges.size() && cayley::factor_of(spec, p.edges[end]) == f) ++end;
        Component c;
        c.factor = f;
        c.start_index = k;
        c.end_index = end;
        c.start_vertex = p.vertices[k];
        c.end_vertex = p.vertices[end];
        c.label = multiply(spec, invert(c.start_vertex), c.end_vertex);
        out.push_back(std::move(c));
        k = end;
    }
    return out;
}

/**
 * Indices of the phase vertices: every vertex except the strict interiors of
 * components.
 */
inline std::vector<std::size_t> phase_vertices(const GroupSpec& spec, const Path& p) {
    std::vector<bool> interior(p.vertices.size(), false);
    for (const auto& c : decompose(spec, p))
        for (std::size_t v = c.start_index + 1; v < c.end_index; ++v) interior[v] = true;
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < p.vertices.size(); ++v)
        if (!interior[v]) out.push_back(v);
    return out;
}

/**
 * Two same-factor components are connected if their start vertices lie in the
 * same left H_i-coset (equivalently, a path labelled by an element of H_i
 * joins them).  Components of different factors cannot be compared.
 */
inline bool connected(const GroupSpec& spec, const Component& c1, const Component& c2) {
    if (c1.factor != c2.factor)
        throw Error(ErrorCode::PreconditionViolated, "connected() needs components of the same factor");
    (void)spec;
    return cayley::detail::coset_key(c1.start_vertex, c1.factor) ==
           cayley::detail::coset_key(c2.start_vertex, c2.factor);
}

/** True iff no two distinct same-factor components of the path are connected. */
inline bool is_without_backtracking(const GroupSpec& spec, const Path& p) {
    const auto comps = decompose(spec, p);
    for (std::size_t i = 0; i < comps.size(); ++i)
        for (std::size_t j = i + 1; j < comps.size(); ++j)
            if (comps[i].factor == comps[j].factor && connected(spec, comps[i], comps[j])) return false;
    return true;
}

/**
 * Two identically labelled paths together with their characteristic elements
 * g1 = (p_-)^-1 q_- and g2 = (p_+)^-1 q_+.  Construct via make_symmetric_pair,
 * which checks the labels and derives g1, g2 (g2 = label^-1 * g1 * label then
 * holds automatically).
 */
struct SymmetricPair {
    Path p;
    Path q;
    NormalForm g1;
    NormalForm g2;
};

inline SymmetricPair make_symmetric_pair(const GroupSpec& spec, Path p, Path q) {
    if (!(p.edges == q.edges))
        throw Error(ErrorCode::PreconditionViolated, "symmetric pair needs identically labelled paths");
    SymmetricPair pair;
    pair.g1 = multiply(spec, invert(p.vertices.front()), q.vertices.front());
    pair.g2 = multiply(spec, invert(p.vertices.back()), q.vertices.back());
    pair.p = std::move(p);
    pair.q = std::move(q);
    return pair;
}

/** The k-th vertices of p and q for each k (well-defined: labels are identical). */
inline std::vector<std::pair<NormalForm, NormalForm>> synchronous_pairs(const SymmetricPair& pair) {
    std::vector<std::pair<NormalForm, NormalForm>> out;
    out.reserve(pair.p.vertices.size());
    for (std::size_t k = 0; k < pair.p.vertices.size(); ++k)
        out.emplace_back(pair.p.vertices[k], pair.q.vertices[k]);
    return out;
}

/**
 * The exact minimum relative length over all y with y^-1 g1 y = g2, with a
 * witness; nullopt when g1 and g2 are not conjugate.  The conjugator set is
 * walked structurally: it is a coset of the centralizer of g1, which in a
 * free product of abelian factors is either the whole group (g1 = 1), the
 * conjugated peripheral factor (parabolic), or the cyclic group generated by
 * the conjugated primitive root of the core (hyperbolic), scanned outward
 * with a sound stopping bound.
 */
inline std::optional<std::pair<NormalForm, std::uint64_t>> min_rel_conjugator(const GroupSpec& spec,
                                                                              const NormalForm& g1,
                                                                              const NormalForm& g2) {
    using group_model::cyclic_reduce;
    const auto [core_a, c_a] = cyclic_reduce(spec, g1);
    const auto [core_b, c_b] = cyclic_reduce(spec, g2);
    if (core_a.syllables.size() != core_b.syllables.size()) return std::nullopt;

    if (core_a.is_identity()) {
        // g1 = g2 = 1: everything conjugates; the identity is shortest.
        return std::make_pair(NormalForm{}, std::uint64_t{0});
    }

    const NormalForm u = invert(c_a);

    if (core_a.syllables.size() == 1 && spec.peripheral(core_a.syllables[0].factor)) {
        // Parabolic: conjugators are exactly c_a^-1 H_i c_b, and rel_length of
        // c_a^-1 h c_b takes at most three values: the generic one (any h that
        // leaves a middle syllable), h = 0, and the h that cancels the middle
        // syllable entirely.  Evaluate one candidate of each kind.
        if (!(core_a == core_b)) return std::nullopt;  // abelian conjugacy is equality
        const int i = core_a.syllables[0].factor;
        const std::size_t rank = core_a.syllables[0].exps.size();
        std::vector<std::int64_t> cancel(rank, 0);
        if (!u.syllables.empty() && u.syllables.back().factor == i)
            for (std::size_t k = 0; k < rank; ++k) cancel[k] = checked_neg(u.syllables.back().exps[k]);
        if (!c_b.syllables.empty() && c_b.syllables.front().factor == i)
            for (std::size_t k = 0; k < rank; ++k) cancel[k] = checked_add(cancel[k], checked_neg(c_b.syllables.front().exps[k]));
        std::vector<std::vector<std::int64_t>> candidates;
        candidates.push_back(std::vector<std::int64_t>(rank, 0));
        if (cancel != candidates[0]) candidates.push_back(cancel);
        for (std::int64_t probe = 1;; ++probe) {  // one generic h distinct from the special values
            std::vector<std::int64_t> h(rank, 0);
            h[0] = probe;
            if (std::find(candidates.begin(), candidates.end(), h) == candidates.end()) {
                candidates.push_back(std::move(h));
                break;
            }
        }
        std::optional<std::pair<NormalForm, std::uint64_t>> best;
        for (const auto& h : candidates) {
            NormalForm hnf;
            group_model::detail::append_syllable(hnf.syllables, i, h);
            const NormalForm y = multiply(spec, u, multiply(spec, hnf, c_b));
            const std::uint64_t len = rel_length(spec, y);
            if (!best || len < best->second) best = {y, len};
        }
        return best;
    }

    // Hyperbolic: find the primitive root W of core_a (syllable-sequence
    // period; for a single non-peripheral syllable u^k the root is u^sign(k))
    // and a rotation prefix P with P^-1 core_a P = core_b.  Conjugators are
    // exactly { c_a^-1 W^j P c_b : j in Z }.
    NormalForm w;
    std::size_t period = 1;
    if (core_a.syllables.size() == 1) {
        w.syllables.push_back({core_a.syllables[0].factor, {core_a.syllables[0].exps[0] < 0 ? -1 : +1}});
    } else {
        const std::size_t n = core_a.syllables.size();
        period = n;
        for (std::size_t p = 1; p < n; ++p) {
            if (n % p != 0) continue;
            bool ok = true;
            for (std::size_t k = 0; k < n && ok; ++k) ok = core_a.syllables[k] == core_a.syllables[k % p];
            if (ok) {
                period = p;
                break;
            }
        }
        w.syllables.assign(core_a.syllables.begin(), core_a.syllables.begin() + static_cast<std::ptrdiff_t>(period));
    }
    std::optional<NormalForm> rot;
    if (core_a.syllables.size() == 1) {
        if (core_a == core_b) rot = NormalForm{};
    } else {
        const std::size_t n = core_a.syllables.size();
        for (std::size_t r = 0; r < n && !rot; ++r) {
            bool match = true;
            for (std::size_t k = 0; k < n && match; ++k) match = core_a.syllables[(r + k) % n] == core_b.syllables[k];
            if (match) {
                NormalForm prefix;
                prefix.syllables.assign(core_a.syllables.begin(), core_a.syllables.begin() + static_cast<std::ptrdiff_t>(r));
                rot = std::move(prefix);
            }
        }
    }
    if (!rot) return std::nullopt;

    const NormalForm tail = multiply(spec, *rot, c_b);
    const std::uint64_t rel_w = rel_length(spec, w);
    const std::uint64_t slack = rel_length(spec, u) + rel_length(spec, tail);
    std::optional<std::pair<NormalForm, std::uint64_t>> best;
    for (const int dir : {+1, -1}) {
        NormalForm wpow;  // identity
        for (std::uint64_t j = 0;; ++j) {
            if (dir < 0 && j == 0) continue;  // j = 0 handled on the +1 side
            if (j > 0) wpow = multiply(spec, wpow, dir > 0 ? w : invert(w));
            if (best && j * rel_w > slack + best->second) break;  // rel_length(y) >= j*rel_w - slack
            const NormalForm y = multiply(spec, u, multiply(spec, wpow, tail));
            const std::uint64_t len = rel_length(spec, y);
            if (!best || len < best->second) best = {y, len};
        }
    }
    return best;
}

/**
 * A symmetric pair of geodesics is minimal if no symmetric geodesic pair with
 * the same characteristic elements is relatively shorter.  Any conjugator y
 * of (g1, g2) labels such a pair (a geodesic of length rel_length(y)), so
 * minimality is exactly rel_path_length(p) == min rel_length over the
 * conjugator set.  The search refuses pairs longer than search_cap.
 */
inline bool is_minimal_pair(const GroupSpec& spec, const SymmetricPair& pair, std::uint64_t search_cap) {
    if (cayley::rel_path_length(pair.p) > search_cap)
        throw Error(ErrorCode::SearchCapExceeded,
                    "pair of relative length " + std::to_string(cayley::rel_path_length(pair.p)) +
                        " exceeds search cap " + std::to_string(search_cap));
    const auto best = min_rel_conjugator(spec, pair.g1, pair.g2);
    // The pair's own label conjugates g1 to g2, so a minimum always exists.
    if (!best) throw std::logic_error("symmetric pair whose characteristic elements are not conjugate");
    return cayley::rel_path_length(pair.p) == best->second;
}

/** One recorded deviation from a lemma's conclusion. */
struct Violation {
    std::string kind;
    std::vector<std::size_t> indices;
    std::string details;

    bool operator==(const Violation&) const = default;
};

/** Outcome of a lemma check over one pair: violations are data, not errors. */
struct Report {
    std::string pair_id;
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

inline std::string report_to_json(const Report& r) {
    nlohmann::ordered_json doc;
    doc["pair_id"] = r.pair_id;
    doc["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : r.violations)
        doc["violations"].push_back({{"kind", v.kind}, {"indices", v.indices}, {"details", v.details}});
    return doc.dump();
}

/**
 * Check the two minimal-pair conclusions on a symmetric pair: (i) connected
 * components across p and q sit at synchronous positions (equal start
 * indices); (ii) the products (u_k)^-1 v_k over synchronous vertex pairs are
 * pairwise distinct.
 */
inline Report check_minimal_pair_properties(const GroupSpec& spec, const SymmetricPair& pair,
                                            std::string pair_id = {}) {
    Report report;
    report.pair_id = std::move(pair_id);

    const auto comps_p = decompose(spec, pair.p);
    const auto comps_q = decompose(spec, pair.q);
    for (std::size_t i = 0; i < comps_p.size(); ++i) {
        for (std::size_t j = 0; j < comps_q.size(); ++j) {
            if (comps_p[i].factor != comps_q[j].factor) continue;
            if (!connected(spec, comps_p[i], comps_q[j])) continue;
            if (comps_p[i].start_index != comps_q[j].start_index)
                report.violations.push_back(
                    {"asynchronous-connected-components",
                     {comps_p[i].start_index, comps_q[j].start_index},
                     "connected components start at different path offsets"});
        }
    }

    const auto sync = synchronous_pairs(pair);
    std::vector<std::pair<NormalForm, std::size_t>> products;
    for (std::size_t k = 0; k < sync.size(); ++k)
        products.emplace_back(multiply(spec, invert(sync[k].first), sync[k].second), k);
    for (std::size_t i = 0; i < products.size(); ++i)
        for (std::size_t j = i + 1; j < products.size(); ++j)
            if (products[i].first == products[j].first)
                report.violations.push_back({"repeated-synchronous-product",
                                             {products[i].second, products[j].second},
                                             "two synchronous vertex pairs yield the same product"});
    return report;
}

}  // namespace relhyp::geometry
