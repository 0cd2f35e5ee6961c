#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "carnot/errors.hpp"

namespace carnot {

// All exact arithmetic in the library runs on GMP rationals. Rat values are
// kept canonical (reduced, positive denominator) by construction.
using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
    if (den == 0) throw SpecError("rational with zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline bool rat_is_zero(const Rat& q) { return sgn(q) == 0; }

inline double rat_double(const Rat& q) { return q.get_d(); }

inline Rat rat_pow(const Rat& base, unsigned long e) {
    Rat out;
    mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), e);
    return out; // num/den coprime => powers coprime
}

inline Int int_binom(unsigned long n, unsigned long k) {
    Int out;
    mpz_bin_uiui(out.get_mpz_t(), n, k);
    return out;
}

inline Int int_factorial(unsigned long n) {
    Int out;
    mpz_fac_ui(out.get_mpz_t(), n);
    return out;
}

// Parses "p", "-p", or "p/q" with q != 0. This is the on-disk rational format
// of spec files and reports.
inline Rat parse_rat(const std::string& s) {
    if (s.empty()) throw SpecError("empty rational literal");
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            Int n(s);
            return Rat(n);
        }
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (sgn(den) == 0) throw SpecError("rational literal '" + s + "' has zero denominator");
        Rat q(num);
        q /= Rat(den);
        return q;
    } catch (const std::invalid_argument&) {
        throw SpecError("malformed rational literal '" + s + "'");
    }
}

inline std::string rat_str(const Rat& q) {
    Rat c = q;
    c.canonicalize();
    return c.get_str();
}

} // namespace carnot
