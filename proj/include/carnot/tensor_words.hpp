#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "carnot/errors.hpp"
#include "carnot/linalg.hpp"
#include "carnot/rational.hpp"

namespace carnot {

// Sparse element of the free associative algebra on an alphabet of letters
// 0..m-1. Words multiply by concatenation. Used for Hall-basis expansions and
// for expanding bracket patterns into tensor words.
using TensorWord = std::vector<uint8_t>;

struct TensorPoly {
    std::map<TensorWord, Rat> terms;

    static TensorPoly letter(uint8_t l) {
        TensorPoly p;
        p.terms[{l}] = 1;
        return p;
    }
    static TensorPoly word(const TensorWord& w) {
        TensorPoly p;
        p.terms[w] = 1;
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    TensorPoly& add_term(const TensorWord& w, const Rat& c) {
        auto it = terms.find(w);
        if (it == terms.end()) {
            if (!rat_is_zero(c)) terms.emplace(w, c);
        } else {
            it->second += c;
            if (rat_is_zero(it->second)) terms.erase(it);
        }
        return *this;
    }

    TensorPoly operator+(const TensorPoly& o) const {
        TensorPoly s = *this;
        for (const auto& [w, c] : o.terms) s.add_term(w, c);
        return s;
    }
    TensorPoly operator-(const TensorPoly& o) const {
        TensorPoly s = *this;
        for (const auto& [w, c] : o.terms) s.add_term(w, -c);
        return s;
    }
    TensorPoly operator*(const TensorPoly& o) const {
        TensorPoly p;
        for (const auto& [w1, c1] : terms)
            for (const auto& [w2, c2] : o.terms) {
                TensorWord w = w1;
                w.insert(w.end(), w2.begin(), w2.end());
                p.add_term(w, c1 * c2);
            }
        return p;
    }
    TensorPoly scaled(const Rat& c) const {
        TensorPoly p;
        if (rat_is_zero(c)) return p;
        for (const auto& [w, v] : terms) p.terms[w] = v * c;
        return p;
    }
    TensorPoly truncated_above(size_t max_len) const {
        TensorPoly p;
        for (const auto& [w, v] : terms)
            if (w.size() <= max_len) p.terms[w] = v;
        return p;
    }
};

inline TensorPoly tensor_commutator(const TensorPoly& a, const TensorPoly& b) {
    return a * b - b * a;
}

// ---------------------------------------------------------------------------
// Hall basis of the free Lie algebra on m generators, truncated at degree r.
//
// Elements are ordered by creation: generators first, then degree by degree.
// [u, v] is a Hall element iff u > v and (u is a generator or right(u) <= v);
// this is the classical left-normed Hall family, so e.g. for m = 2 the degree
// 3 elements are [[X2,X1],X1] and [[X2,X1],X2].
// ---------------------------------------------------------------------------

struct HallElement {
    int left = -1, right = -1; // children indices, -1 for generators
    int letter = -1;           // generator letter, -1 for brackets
    int degree = 1;
};

inline std::vector<HallElement> hall_basis(int m, int r) {
    std::vector<HallElement> h;
    for (int i = 0; i < m; ++i) h.push_back(HallElement{-1, -1, i, 1});
    for (int d = 2; d <= r; ++d) {
        const int known = static_cast<int>(h.size());
        for (int v = 0; v < known; ++v) {
            for (int u = v + 1; u < known; ++u) {
                if (h[u].degree + h[v].degree != d) continue;
                if (h[u].letter < 0 && h[u].right > v) continue;
                h.push_back(HallElement{u, v, -1, d});
            }
        }
    }
    return h;
}

inline TensorPoly hall_expansion(const std::vector<HallElement>& h, int i) {
    const HallElement& e = h[static_cast<size_t>(i)];
    if (e.letter >= 0) return TensorPoly::letter(static_cast<uint8_t>(e.letter));
    return tensor_commutator(hall_expansion(h, e.left), hall_expansion(h, e.right));
}

inline std::string hall_name(const std::vector<HallElement>& h, int i) {
    const HallElement& e = h[static_cast<size_t>(i)];
    if (e.letter >= 0) return "X" + std::to_string(e.letter + 1);
    return "[" + hall_name(h, e.left) + "," + hall_name(h, e.right) + "]";
}

// Coordinates of a homogeneous Lie element (given by its tensor expansion)
// over the Hall elements of the same degree. The system is always consistent
// for genuine Lie elements; inconsistency is an internal error.
inline std::vector<Rat> hall_coordinates(const std::vector<HallElement>& h,
                                         const std::vector<TensorPoly>& expansions,
                                         const TensorPoly& lie, int degree) {
    std::vector<int> cols;
    for (size_t i = 0; i < h.size(); ++i)
        if (h[i].degree == degree) cols.push_back(static_cast<int>(i));
    std::map<TensorWord, int> row_of;
    auto touch = [&](const TensorPoly& p) {
        for (const auto& [w, c] : p.terms)
            if (!row_of.count(w)) {
                int n = static_cast<int>(row_of.size());
                row_of[w] = n;
            }
    };
    for (int c : cols) touch(expansions[static_cast<size_t>(c)]);
    touch(lie);

    RatMatrix mat(static_cast<int>(row_of.size()), static_cast<int>(cols.size()));
    std::vector<Rat> rhs(row_of.size());
    for (size_t k = 0; k < cols.size(); ++k)
        for (const auto& [w, c] : expansions[static_cast<size_t>(cols[k])].terms)
            mat.at(row_of[w], static_cast<int>(k)) = c;
    for (const auto& [w, c] : lie.terms) rhs[static_cast<size_t>(row_of[w])] = c;

    auto sol = solve(mat, rhs);
    if (!sol) throw CertificateError("hall_coordinates: element is not in the Hall span");
    std::vector<Rat> out(h.size());
    for (size_t k = 0; k < cols.size(); ++k) out[static_cast<size_t>(cols[k])] = (*sol)[k];
    return out;
}

} // namespace carnot
