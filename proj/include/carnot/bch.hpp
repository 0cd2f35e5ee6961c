#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "carnot/rational.hpp"

namespace carnot {

// One monomial of the Dynkin expansion of log(exp(x) exp(y)). `letters` is a
// word over {0 = x, 1 = y}; the associated Lie element is the right-nested
// bracket ad(l_0) ad(l_1) ... ad(l_{k-2}) (l_{k-1}), a single letter standing
// for the element itself.
struct BchTerm {
    Rat coeff;
    std::vector<uint8_t> letters;
};

namespace detail {

inline void dynkin_blocks(int max_weight, int blocks_so_far, int weight_so_far,
                          std::vector<uint8_t>& letters,
                          std::map<std::vector<uint8_t>, Rat>& acc, const Int& factorials_den) {
    // Extend by one block (p, q) with p + q >= 1.
    for (int p = 0; weight_so_far + p <= max_weight; ++p) {
        for (int q = (p == 0 ? 1 : 0); weight_so_far + p + q <= max_weight; ++q) {
            const int n = blocks_so_far + 1;
            const int w = weight_so_far + p + q;
            const size_t base = letters.size();
            letters.insert(letters.end(), static_cast<size_t>(p), 0);
            letters.insert(letters.end(), static_cast<size_t>(q), 1);

            Int den = factorials_den * int_factorial(static_cast<unsigned long>(p)) *
                      int_factorial(static_cast<unsigned long>(q));
            // Close the term at this block count.
            const size_t len = letters.size();
            const bool trivially_zero =
                len >= 2 && letters[len - 2] == letters[len - 1];
            if (!trivially_zero) {
                Rat c(((n - 1) % 2 == 0) ? 1 : -1);
                c /= Rat(Int(n) * Int(w) * den);
                acc[letters] += c;
            }
            dynkin_blocks(max_weight, n, w, letters, acc, den);
            letters.resize(base);
        }
    }
}

} // namespace detail

// Dynkin series of log(exp(x) exp(y)) with all monomials of weight at most
// max_weight. On a nilpotent algebra of step r, dynkin_series(r) is the exact
// group law in exponential coordinates.
inline std::vector<BchTerm> dynkin_series(int max_weight) {
    std::map<std::vector<uint8_t>, Rat> acc;
    std::vector<uint8_t> letters;
    detail::dynkin_blocks(max_weight, 0, 0, letters, acc, Int(1));
    std::vector<BchTerm> out;
    for (auto& [word, c] : acc) {
        if (rat_is_zero(c)) continue;
        out.push_back(BchTerm{c, word});
    }
    return out;
}

} // namespace carnot
