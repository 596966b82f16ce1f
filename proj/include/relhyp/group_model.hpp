#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relhyp/util.hpp"

namespace relhyp::group_model {

/**
 * One free factor of the ambient free product: a free abelian group Z^rank
 * with named generators.  Factors of rank >= 2 must be peripheral (they are
 * the collapsed subgroups of the relative metric); non-peripheral factors
 * must have rank 1.
 */
struct Factor {
    std::string name;
    int rank = 0;
    bool peripheral = false;
    std::vector<std::string> generator_names;
};

/**
 * The ambient group G = F_0 * F_1 * ... as an ordered factor list, plus the
 * derived generator tables everything else indexes through.  Construct via
 * GroupSpec::make (it validates and builds the tables); instances are
 * immutable values afterwards.
 */
struct GroupSpec {
    struct Generator {
        int factor = 0;  ///< owning factor index
        int index = 0;   ///< position within the factor
        std::string name;
    };

    std::vector<Factor> factors;
    std::vector<Generator> generators;  ///< global order: by factor, then in-factor order
    std::unordered_map<std::string, int> generator_ids;

    static GroupSpec make(std::vector<Factor> factors) {
        if (factors.empty()) throw Error(ErrorCode::ConfigError, "group needs at least one factor");
        GroupSpec spec;
        spec.factors = std::move(factors);
        for (int f = 0; f < static_cast<int>(spec.factors.size()); ++f) {
            const Factor& fac = spec.factors[f];
            if (fac.rank < 1)
                throw Error(ErrorCode::ConfigError, "factor '" + fac.name + "' has rank < 1 (only free abelian Z^rank factors are supported)");
            if (!fac.peripheral && fac.rank != 1)
                throw Error(ErrorCode::ConfigError, "factor '" + fac.name + "' has rank >= 2 but is not peripheral");
            if (static_cast<int>(fac.generator_names.size()) != fac.rank)
                throw Error(ErrorCode::ConfigError, "factor '" + fac.name + "' needs exactly rank generator names");
            for (int i = 0; i < fac.rank; ++i) {
                const std::string& name = fac.generator_names[i];
                if (name.empty() || name.find_first_of(" \t^") != std::string::npos)
                    throw Error(ErrorCode::ConfigError, "bad generator name '" + name + "'");
                const int id = static_cast<int>(spec.generators.size());
                if (!spec.generator_ids.emplace(name, id).second)
                    throw Error(ErrorCode::ConfigError, "duplicate generator name '" + name + "'");
                spec.generators.push_back({f, i, name});
            }
        }
        return spec;
    }

    int factor_count() const { return static_cast<int>(factors.size()); }
    int total_rank() const { return static_cast<int>(generators.size()); }

    /** |X| for the bound formulas: generators together with their inverses. */
    int x_count() const { return 2 * total_rank(); }

    int generator_id(const std::string& name) const {
        const auto it = generator_ids.find(name);
        if (it == generator_ids.end()) throw Error(ErrorCode::UnknownGenerator, "'" + name + "'");
        return it->second;
    }

    bool peripheral(int factor) const { return factors[factor].peripheral; }
};

/** Parse a group config JSON document: { "factors": [ {name, rank, peripheral, generators}, ... ] }. */
inline GroupSpec group_spec_from_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("group config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("factors") || !doc["factors"].is_array())
        throw Error(ErrorCode::ConfigError, "group config needs a top-level \"factors\" array");
    std::vector<Factor> factors;
    for (const auto& jf : doc["factors"]) {
        Factor f;
        try {
            f.name = jf.at("name").get<std::string>();
            f.rank = jf.at("rank").get<int>();
            f.peripheral = jf.at("peripheral").get<bool>();
            f.generator_names = jf.at("generators").get<std::vector<std::string>>();
        } catch (const std::exception& e) {
            throw Error(ErrorCode::ConfigError, std::string("bad factor entry: ") + e.what());
        }
        factors.push_back(std::move(f));
    }
    return GroupSpec::make(std::move(factors));
}

/** Load a group config from a file path. */
inline GroupSpec load_group_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open group config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return group_spec_from_json(buf.str());
}

/** A letter of a word: a generator with exponent +1 or -1. */
struct Letter {
    int gen = 0;
    int sign = +1;
    bool operator==(const Letter&) const = default;
};

/** A word in the generators: the label alphabet of paths. */
struct Word {
    std::vector<Letter> letters;
    bool operator==(const Word&) const = default;
};

/**
 * One syllable of a normal form: a nonzero exponent vector in a single
 * factor.  exps.size() == rank of the factor.
 */
struct Syllable {
    int factor = 0;
    std::vector<std::int64_t> exps;
    bool operator==(const Syllable&) const = default;

    bool zero() const {
        for (const auto e : exps)
            if (e != 0) return false;
        return true;
    }
};

/**
 * The alternating-syllable normal form of a group element — the universal
 * element currency.  Invariants: no zero syllable, adjacent syllables in
 * distinct factors, empty list = identity.  Equality of normal forms is
 * equality in G.
 */
struct NormalForm {
    std::vector<Syllable> syllables;
    bool operator==(const NormalForm&) const = default;

    bool is_identity() const { return syllables.empty(); }
};

struct NfHash {
    std::size_t operator()(const NormalForm& nf) const {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (const auto& s : nf.syllables) {
            hash_combine(h, static_cast<std::size_t>(s.factor) + 1);
            for (const auto e : s.exps) hash_combine(h, static_cast<std::size_t>(e) * 0x100000001b3ULL + 7);
        }
        return h;
    }
};

namespace detail {

/**
 * Append one syllable to a syllable list, merging (and cancelling) at the
 * boundary.  The list stays a valid normal form if it was one.
 */
inline void append_syllable(std::vector<Syllable>& sylls, int factor, const std::vector<std::int64_t>& exps) {
    if (!sylls.empty() && sylls.back().factor == factor) {
        Syllable& last = sylls.back();
        for (std::size_t i = 0; i < exps.size(); ++i) last.exps[i] = checked_add(last.exps[i], exps[i]);
        if (last.zero()) sylls.pop_back();
        return;
    }
    Syllable s;
    s.factor = factor;
    s.exps = exps;
    if (!s.zero()) sylls.push_back(std::move(s));
}

inline void append_letter(const GroupSpec& spec, std::vector<Syllable>& sylls, int gen, int sign) {
    const auto& g = spec.generators[gen];
    std::vector<std::int64_t> exps(spec.factors[g.factor].rank, 0);
    exps[g.index] = sign;
    append_syllable(sylls, g.factor, exps);
}

}  // namespace detail

/**
 * Tokenize a word: whitespace-separated tokens "g", "g^-1", or generally
 * "g^k" with k an integer, expanded to |k| letters of sign sgn(k).
 * Errors: UnknownGenerator, MalformedExponent.
 */
inline Word parse_word(const std::string& text, const GroupSpec& spec) {
    Word w;
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        std::string name = token;
        std::int64_t exp = 1;
        const auto caret = token.find('^');
        if (caret != std::string::npos) {
            name = token.substr(0, caret);
            const std::string etext = token.substr(caret + 1);
            std::size_t pos = etext.empty() || etext[0] != '-' ? 0 : 1;
            if (pos >= etext.size()) throw Error(ErrorCode::MalformedExponent, "'" + token + "'");
            for (std::size_t i = pos; i < etext.size(); ++i)
                if (etext[i] < '0' || etext[i] > '9') throw Error(ErrorCode::MalformedExponent, "'" + token + "'");
            try {
                exp = std::stoll(etext);
            } catch (const std::exception&) {
                throw Error(ErrorCode::MalformedExponent, "'" + token + "'");
            }
        }
        const int gen = spec.generator_id(name);
        const int sign = exp < 0 ? -1 : +1;
        for (std::int64_t i = 0; i < (exp < 0 ? -exp : exp); ++i) w.letters.push_back({gen, sign});
    }
    return w;
}

/** Fold a word into its unique alternating-syllable normal form. */
inline NormalForm normalize(const GroupSpec& spec, const Word& w) {
    NormalForm nf;
    for (const auto& letter : w.letters) detail::append_letter(spec, nf.syllables, letter.gen, letter.sign);
    return nf;
}

/** Product of two normal forms, boundary syllables merged/cancelled recursively. */
inline NormalForm multiply(const GroupSpec& spec, const NormalForm& a, const NormalForm& b) {
    (void)spec;
    NormalForm r = a;
    r.syllables.reserve(a.syllables.size() + b.syllables.size());
    for (const auto& s : b.syllables) detail::append_syllable(r.syllables, s.factor, s.exps);
    return r;
}

/** Inverse: syllables reversed with negated exponents. */
inline NormalForm invert(const NormalForm& a) {
    NormalForm r;
    r.syllables.reserve(a.syllables.size());
    for (auto it = a.syllables.rbegin(); it != a.syllables.rend(); ++it) {
        Syllable s;
        s.factor = it->factor;
        s.exps.reserve(it->exps.size());
        for (const auto e : it->exps) s.exps.push_back(checked_neg(e));
        r.syllables.push_back(std::move(s));
    }
    return r;
}

/** Word-problem decision: structural equality of normal forms. */
inline bool equal(const NormalForm& a, const NormalForm& b) { return a == b; }

/** ||g||_X: sum over syllables of the l1 norm of the exponent vector. */
inline std::uint64_t x_length(const NormalForm& g) {
    std::uint64_t n = 0;
    for (const auto& s : g.syllables)
        for (const auto e : s.exps) n += abs_u64(e);
    return n;
}

/**
 * Relative length |g|_{X∪H}: each peripheral syllable is one coset move,
 * each non-peripheral (rank-1) syllable contributes its letter count.
 */
inline std::uint64_t rel_length(const GroupSpec& spec, const NormalForm& g) {
    std::uint64_t n = 0;
    for (const auto& s : g.syllables) {
        if (spec.peripheral(s.factor)) {
            n += 1;
        } else {
            for (const auto e : s.exps) n += abs_u64(e);
        }
    }
    return n;
}

/**
 * Cyclic reduction with the convention g = c^{-1} · core · c.  The front
 * syllable is rotated to the back until the ends lie in distinct factors (or
 * one syllable is left); c accumulates the peeled prefix.
 */
inline std::pair<NormalForm, NormalForm> cyclic_reduce(const GroupSpec& spec, const NormalForm& g) {
    NormalForm core = g;
    NormalForm c;  // identity
    while (core.syllables.size() >= 2 && core.syllables.front().factor == core.syllables.back().factor) {
        NormalForm first;
        first.syllables.push_back(core.syllables.front());
        NormalForm rest;
        rest.syllables.assign(core.syllables.begin() + 1, core.syllables.end());
        core = multiply(spec, rest, first);
        c = multiply(spec, invert(first), c);
    }
    return {core, c};
}

/**
 * Conjugacy type of an element: Identity; Parabolic (conjugate into a
 * peripheral factor, with the witness: element = conjugator^{-1} ·
 * representative · conjugator); or Hyperbolic.
 */
struct Classification {
    enum class Kind { Identity, Parabolic, Hyperbolic };

    Kind kind = Kind::Identity;
    int factor = -1;            ///< peripheral factor index (Parabolic only)
    NormalForm representative;  ///< single peripheral syllable (Parabolic only)
    NormalForm conjugator;      ///< Parabolic only

    bool operator==(const Classification&) const = default;
};

inline const char* classification_name(Classification::Kind k) {
    switch (k) {
        case Classification::Kind::Identity: return "Identity";
        case Classification::Kind::Parabolic: return "Parabolic";
        case Classification::Kind::Hyperbolic: return "Hyperbolic";
    }
    return "?";
}

/**
 * Classify g: Identity iff empty; Parabolic iff the cyclically reduced core
 * is a single syllable in a peripheral factor; Hyperbolic otherwise (core of
 * >= 2 syllables, or a single syllable in a non-peripheral factor).
 */
inline Classification classify(const GroupSpec& spec, const NormalForm& g) {
    Classification c;
    if (g.is_identity()) {
        c.kind = Classification::Kind::Identity;
        return c;
    }
    auto [core, conj] = cyclic_reduce(spec, g);
    if (core.syllables.size() == 1 && spec.peripheral(core.syllables[0].factor)) {
        c.kind = Classification::Kind::Parabolic;
        c.factor = core.syllables[0].factor;
        c.representative = std::move(core);
        c.conjugator = std::move(conj);
        return c;
    }
    c.kind = Classification::Kind::Hyperbolic;
    return c;
}

/**
 * Conjugacy search inside one peripheral (abelian) factor: a and b are
 * conjugate in H_i iff they are equal, and then the zero vector conjugates.
 * Errors: NotPeripheral.
 */
inline std::optional<std::vector<std::int64_t>> peripheral_csp(const GroupSpec& spec, int factor,
                                                               const std::vector<std::int64_t>& a,
                                                               const std::vector<std::int64_t>& b) {
    if (factor < 0 || factor >= spec.factor_count())
        throw Error(ErrorCode::PreconditionViolated, "factor index out of range");
    if (!spec.peripheral(factor)) throw Error(ErrorCode::NotPeripheral, "factor '" + spec.factors[factor].name + "'");
    const std::size_t rank = static_cast<std::size_t>(spec.factors[factor].rank);
    if (a.size() != rank || b.size() != rank)
        throw Error(ErrorCode::PreconditionViolated, "exponent vector size != factor rank");
    if (a == b) return std::vector<std::int64_t>(rank, 0);
    return std::nullopt;
}

/** parse + normalize convenience used throughout tests and the CLI. */
inline NormalForm nf_of(const GroupSpec& spec, const std::string& text) {
    return normalize(spec, parse_word(text, spec));
}

/** Expand a normal form back into a letter word (for round-trip checks). */
inline Word word_of(const GroupSpec& spec, const NormalForm& nf) {
    Word w;
    for (const auto& s : nf.syllables) {
        for (std::size_t i = 0; i < s.exps.size(); ++i) {
            const std::int64_t e = s.exps[i];
            if (e == 0) continue;
            int gen = 0;
            for (int f = 0; f < s.factor; ++f) gen += spec.factors[f].rank;
            gen += static_cast<int>(i);
            const int sign = e < 0 ? -1 : +1;
            for (std::uint64_t k = 0; k < abs_u64(e); ++k) w.letters.push_back({gen, sign});
        }
    }
    return w;
}

/** Render a normal form in the CLI word syntax ("t u", "s^2 t^-1 u^3"; identity = ""). */
inline std::string to_word_string(const GroupSpec& spec, const NormalForm& nf) {
    std::string out;
    for (const auto& s : nf.syllables) {
        for (std::size_t i = 0; i < s.exps.size(); ++i) {
            const std::int64_t e = s.exps[i];
            if (e == 0) continue;
            if (!out.empty()) out += ' ';
            out += spec.factors[s.factor].generator_names[i];
            if (e != 1) out += "^" + std::to_string(e);
        }
    }
    return out;
}

/**
 * Independent conjugacy decision for the whole free product, via the
 * classical criterion: cyclically reduced elements of syllable length >= 2
 * are conjugate iff their syllable sequences are cyclic rotations of one
 * another; length <= 1 iff same factor and equal there (factors abelian).
 * Returns a verified conjugator when conjugate.
 */
inline std::optional<NormalForm> free_product_conjugacy(const GroupSpec& spec, const NormalForm& a, const NormalForm& b) {
    const auto [core_a, c_a] = cyclic_reduce(spec, a);
    const auto [core_b, c_b] = cyclic_reduce(spec, b);
    const std::size_t na = core_a.syllables.size();
    const std::size_t nb = core_b.syllables.size();
    std::optional<NormalForm> result;

    if (na != nb) return std::nullopt;
    if (na == 0) {
        result = NormalForm{};  // a = b = identity
    } else if (na == 1) {
        // Single-syllable cores: conjugate iff same factor and equal there.
        if (core_a.syllables[0] != core_b.syllables[0]) return std::nullopt;
        result = multiply(spec, invert(c_a), c_b);
    } else {
        // Rotation search, first match wins (deterministic tie-break).
        for (std::size_t r = 0; r < na && !result; ++r) {
            bool match = true;
            for (std::size_t i = 0; i < na && match; ++i) match = core_a.syllables[(r + i) % na] == core_b.syllables[i];
            if (!match) continue;
            NormalForm prefix;
            prefix.syllables.assign(core_a.syllables.begin(), core_a.syllables.begin() + static_cast<std::ptrdiff_t>(r));
            result = multiply(spec, invert(c_a), multiply(spec, prefix, c_b));
        }
        if (!result) return std::nullopt;
    }

    // The criterion is an oracle; make it self-checking.
    const NormalForm check = multiply(spec, invert(*result), multiply(spec, a, *result));
    if (!(check == b)) throw std::logic_error("free_product_conjugacy produced an unverified conjugator");
    return result;
}

}  // namespace relhyp::group_model
