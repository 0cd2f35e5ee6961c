#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "carnot/rational.hpp"

namespace carnot {

// Deterministic, seeded source of small rational sample points. Numerators
// and denominators are bounded by 997 so that every verdict derived from
// samples can be re-verified exactly.
struct RatSampler {
    std::mt19937_64 rng;
    explicit RatSampler(uint64_t seed) : rng(seed) {}

    int int_in(int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return d(rng);
    }

    Rat rational() { return make_rat(int_in(-997, 997), int_in(1, 997)); }

    // nonzero vector with entries in [-997, 997] / [1, 997]
    std::vector<Rat> nonzero_vector(int n) {
        while (true) {
            std::vector<Rat> v(static_cast<size_t>(n));
            bool nz = false;
            for (auto& c : v) {
                c = rational();
                nz = nz || !rat_is_zero(c);
            }
            if (nz) return v;
        }
    }

    // rational point strictly inside the Euclidean ball, checked exactly
    std::vector<Rat> point_in_ball(const std::vector<Rat>& center, const Rat& radius) {
        while (true) {
            std::vector<Rat> u(center.size());
            Rat norm2 = 0;
            for (auto& c : u) {
                c = make_rat(int_in(-997, 997), 997);
                norm2 += c * c;
            }
            if (norm2 >= 1) continue;
            std::vector<Rat> p(center.size());
            for (size_t i = 0; i < p.size(); ++i) p[i] = center[i] + radius * u[i];
            return p;
        }
    }
};

} // namespace carnot
