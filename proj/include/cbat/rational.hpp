// ============================================================================
// rational.hpp — exact rational time values
// ============================================================================
//
// All time values in the engine are exact rationals; there is no floating
// point anywhere. Arithmetic is backed by GMP's mpq_class, with the small
// helpers the region machinery needs (floor, fractional part, formatting).
// ============================================================================

#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace cbat {

using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

/// Floor of an exact rational, as an integer rational.
inline Rat rat_floor(const Rat& v) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
    return Rat(q);
}

inline Rat rat_ceil(const Rat& v) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
    return Rat(q);
}

/// Raw fractional part v - floor(v), always in [0, 1).
inline Rat rat_fract(const Rat& v) { return v - rat_floor(v); }

inline bool rat_is_integer(const Rat& v) { return v.get_den() == 1; }

/// Natural number check (integer and >= 0).
inline bool rat_is_natural(const Rat& v) {
    return rat_is_integer(v) && sgn(v) >= 0;
}

/// Renders "p/q", or just "p" for integers.
inline std::string rat_str(const Rat& v) {
    if (rat_is_integer(v)) return v.get_num().get_str();
    return v.get_num().get_str() + "/" + v.get_den().get_str();
}

/// Fixed-point decimal approximation (for --decimal output only).
inline std::string rat_decimal(const Rat& v, int digits = 4) {
    mpz_class scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    Rat scaled = v * Rat(scale);
    mpz_class q;
    // Round toward zero; good enough for display.
    mpz_tdiv_q(q.get_mpz_t(), scaled.get_num().get_mpz_t(),
               scaled.get_den().get_mpz_t());
    bool neg = q < 0;
    mpz_class a = abs(q);
    std::string s = a.get_str();
    if ((int)s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
    return (neg ? "-" : "") + s;
}

/// Parses "p", "-p", "p/q". Returns nullopt on malformed input.
inline std::optional<Rat> rat_parse(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::string num, den = "1";
    auto slash = text.find('/');
    if (slash == std::string::npos) {
        num = text;
    } else {
        num = text.substr(0, slash);
        den = text.substr(slash + 1);
    }
    auto digits_only = [](const std::string& s, bool allow_sign) {
        if (s.empty()) return false;
        size_t i = (allow_sign && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        if (i >= s.size()) return false;
        for (; i < s.size(); ++i)
            if (!isdigit((unsigned char)s[i])) return false;
        return true;
    };
    if (!digits_only(num, true) || !digits_only(den, false)) return std::nullopt;
    Rat q;
    if (q.set_str(num + "/" + den, 10) != 0) return std::nullopt;
    if (q.get_den() == 0) return std::nullopt;
    q.canonicalize();
    return q;
}

}  // namespace cbat
