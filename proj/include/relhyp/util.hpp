#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace relhyp {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/**
 * Error codes for every domain failure the library can signal.  The CLI maps
 * these to exit code 1 (domain error); config-shaped problems (ConfigError)
 * map to exit code 2.
 */
enum class ErrorCode {
    UnknownGenerator,
    MalformedExponent,
    RadiusExceedsCap,
    NotPeripheral,
    PreconditionViolated,
    NotAConjugator,
    SearchCapExceeded,
    Overflow,
    ConfigError,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::UnknownGenerator: return "UnknownGenerator";
        case ErrorCode::MalformedExponent: return "MalformedExponent";
        case ErrorCode::RadiusExceedsCap: return "RadiusExceedsCap";
        case ErrorCode::NotPeripheral: return "NotPeripheral";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::NotAConjugator: return "NotAConjugator";
        case ErrorCode::SearchCapExceeded: return "SearchCapExceeded";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/**
 * The library's only exception type: a typed code plus a human-readable
 * message.  what() yields "Code: message".
 */
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/**
 * Checked 64-bit arithmetic for normal-form exponents.  Any overflow throws
 * Error(Overflow) instead of wrapping, so long products fail loudly rather
 * than silently corrupting an element.
 */
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "exponent addition overflow");
    return r;
}

inline std::int64_t checked_neg(std::int64_t a) {
    if (a == std::numeric_limits<std::int64_t>::min())
        throw Error(ErrorCode::Overflow, "exponent negation overflow");
    return -a;
}

inline std::uint64_t abs_u64(std::int64_t a) {
    return a < 0 ? ~static_cast<std::uint64_t>(a) + 1 : static_cast<std::uint64_t>(a);
}

inline void hash_combine(std::size_t& seed, std::size_t v) {
    seed ^= v + 0x9E3779B97F4A7C15ULL + (seed << 6) + (seed >> 2);
}

/**
 * Deterministic RNG.  mt19937_64 has a standard-mandated sequence, but
 * std::uniform_int_distribution does not, so bounded draws are done here by
 * rejection sampling — identical streams on every platform, which the
 * byte-identical-output contracts rely on.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /** Uniform draw from {0, 1, ..., n-1}; n must be positive. */
    std::uint64_t uniform(std::uint64_t n) {
        if (n == 0) throw Error(ErrorCode::PreconditionViolated, "Rng::uniform(0)");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    /** Decorrelated per-task seed (golden-ratio mix), for per-trial streams. */
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t task) {
        return seed ^ (0x9E3779B97F4A7C15ULL * (task + 1));
    }

private:
    std::mt19937_64 engine_;
};

/** Rational → "p" or "p/q" (canonical, q > 0). */
inline std::string rational_to_string(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    std::string s = num.str();
    if (den != 1) s += "/" + den.str();
    return s;
}

/** Parse "p" or "p/q" (q > 0) back into a rational. */
inline Rational rational_from_string(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        const BigInt num(s.substr(0, slash));
        const BigInt den(s.substr(slash + 1));
        if (den <= 0) throw Error(ErrorCode::ConfigError, "rational with non-positive denominator: " + s);
        return Rational(num, den);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ConfigError, "bad rational '" + s + "': " + e.what());
    }
}

/** Smallest integer ≥ r, as a big integer. */
inline BigInt ceil_rational(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    BigInt q = num / den;
    if (num > 0 && num % den != 0) ++q;
    return q;
}

}  // namespace relhyp
