#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <vector>

#include "carnot/lie_algebra.hpp"

namespace carnot {

// Exponent vector over the dim(g) exponential coordinates.
using PolyMono = std::vector<uint16_t>;

// Polynomial on G with rational coefficients, graded by the non-isotropic
// degree sum_j weight(j) * exponent_j.
struct GradedPolynomial {
    std::map<PolyMono, Rat> terms;

    static GradedPolynomial constant(int dim, const Rat& c) {
        GradedPolynomial p;
        if (!rat_is_zero(c)) p.terms[PolyMono(static_cast<size_t>(dim), 0)] = c;
        return p;
    }
    static GradedPolynomial coordinate(int dim, int var) {
        GradedPolynomial p;
        PolyMono m(static_cast<size_t>(dim), 0);
        m[static_cast<size_t>(var)] = 1;
        p.terms[m] = 1;
        return p;
    }

    bool is_zero() const { return terms.empty(); }
    bool operator==(const GradedPolynomial& o) const { return terms == o.terms; }

    GradedPolynomial& add_term(const PolyMono& m, const Rat& c) {
        auto it = terms.find(m);
        if (it == terms.end()) {
            if (!rat_is_zero(c)) terms.emplace(m, c);
        } else {
            it->second += c;
            if (rat_is_zero(it->second)) terms.erase(it);
        }
        return *this;
    }
    GradedPolynomial operator+(const GradedPolynomial& o) const {
        GradedPolynomial s = *this;
        for (const auto& [m, c] : o.terms) s.add_term(m, c);
        return s;
    }
    GradedPolynomial operator-(const GradedPolynomial& o) const {
        GradedPolynomial s = *this;
        for (const auto& [m, c] : o.terms) s.add_term(m, -c);
        return s;
    }
    GradedPolynomial operator*(const GradedPolynomial& o) const {
        GradedPolynomial p;
        for (const auto& [m1, c1] : terms)
            for (const auto& [m2, c2] : o.terms) {
                PolyMono m = m1;
                for (size_t i = 0; i < m.size(); ++i) m[i] = static_cast<uint16_t>(m[i] + m2[i]);
                p.add_term(m, c1 * c2);
            }
        return p;
    }
    GradedPolynomial scaled(const Rat& c) const {
        GradedPolynomial p;
        if (rat_is_zero(c)) return p;
        for (const auto& [m, v] : terms) p.terms[m] = v * c;
        return p;
    }

    GradedPolynomial differentiated(int var) const {
        GradedPolynomial p;
        for (const auto& [m, c] : terms) {
            const uint16_t e = m[static_cast<size_t>(var)];
            if (e == 0) continue;
            PolyMono d = m;
            d[static_cast<size_t>(var)] = static_cast<uint16_t>(e - 1);
            p.add_term(d, c * Rat(e));
        }
        return p;
    }

    Rat eval(const std::vector<Rat>& x) const {
        Rat out = 0;
        for (const auto& [m, c] : terms) {
            Rat v = c;
            for (size_t i = 0; i < m.size(); ++i)
                if (m[i] > 0) v *= rat_pow(x[i], m[i]);
            out += v;
        }
        return out;
    }

    // Evaluation against a precomputed power table pows[var][exp].
    double eval_double(const std::vector<std::vector<double>>& pows) const {
        double out = 0;
        for (const auto& [m, c] : terms) {
            double v = rat_double(c);
            for (size_t i = 0; i < m.size(); ++i)
                if (m[i] > 0) v *= pows[i][m[i]];
            out += v;
        }
        return out;
    }

    int max_exponent() const {
        int mx = 0;
        for (const auto& [m, c] : terms)
            for (uint16_t e : m) mx = std::max(mx, static_cast<int>(e));
        return mx;
    }

    int nonisotropic_degree(const GradedLieAlgebra& g) const {
        int d = 0;
        for (const auto& [m, c] : terms) {
            int md = 0;
            for (size_t i = 0; i < m.size(); ++i) md += g.weights[i] * m[i];
            d = std::max(d, md);
        }
        return d;
    }

    // Per-variable affine substitution x_i -> scale_i x_i + shift_i.
    GradedPolynomial substituted_affine(const std::vector<Rat>& scale,
                                        const std::vector<Rat>& shift) const {
        const size_t dim = scale.size();
        GradedPolynomial out;
        for (const auto& [m, c] : terms) {
            GradedPolynomial acc = GradedPolynomial::constant(static_cast<int>(dim), c);
            for (size_t i = 0; i < dim; ++i) {
                if (m[i] == 0) continue;
                GradedPolynomial lin = GradedPolynomial::coordinate(static_cast<int>(dim), static_cast<int>(i))
                                           .scaled(scale[i]) +
                                       GradedPolynomial::constant(static_cast<int>(dim), shift[i]);
                for (uint16_t e = 0; e < m[i]; ++e) acc = acc * lin;
            }
            out = out + acc;
        }
        return out;
    }
};

inline GradedPolynomial poly_pow(const GradedPolynomial& p, int n, int dim) {
    GradedPolynomial out = GradedPolynomial::constant(dim, Rat(1));
    for (int i = 0; i < n; ++i) out = out * p;
    return out;
}

// Differential operator with polynomial coefficients: a finite map from
// coordinate-derivative multi-indices to coefficient polynomials.
struct PolyDiffOperator {
    int dim = 0;
    std::map<PolyMono, GradedPolynomial> terms;

    static PolyDiffOperator identity(int dim) {
        PolyDiffOperator op;
        op.dim = dim;
        op.terms[PolyMono(static_cast<size_t>(dim), 0)] = GradedPolynomial::constant(dim, Rat(1));
        return op;
    }

    bool operator==(const PolyDiffOperator& o) const { return dim == o.dim && terms == o.terms; }
    bool is_zero() const { return terms.empty(); }

    PolyDiffOperator& add_term(const PolyMono& alpha, const GradedPolynomial& p) {
        if (p.is_zero()) return *this;
        auto it = terms.find(alpha);
        if (it == terms.end()) {
            terms.emplace(alpha, p);
        } else {
            GradedPolynomial s = it->second + p;
            if (s.is_zero())
                terms.erase(it);
            else
                it->second = std::move(s);
        }
        return *this;
    }
    PolyDiffOperator operator+(const PolyDiffOperator& o) const {
        PolyDiffOperator s = *this;
        for (const auto& [a, p] : o.terms) s.add_term(a, p);
        return s;
    }
    PolyDiffOperator operator-(const PolyDiffOperator& o) const {
        PolyDiffOperator s = *this;
        for (const auto& [a, p] : o.terms) s.add_term(a, p.scaled(Rat(-1)));
        return s;
    }
    PolyDiffOperator scaled(const Rat& c) const {
        PolyDiffOperator s;
        s.dim = dim;
        for (const auto& [a, p] : terms) s.add_term(a, p.scaled(c));
        return s;
    }

    GradedPolynomial apply(const GradedPolynomial& f) const {
        GradedPolynomial out;
        for (const auto& [alpha, coeff] : terms) {
            GradedPolynomial d = f;
            for (size_t i = 0; i < alpha.size() && !d.is_zero(); ++i)
                for (uint16_t e = 0; e < alpha[i]; ++e) d = d.differentiated(static_cast<int>(i));
            out = out + coeff * d;
        }
        return out;
    }
};

// a(b(f)): Leibniz over the coefficient polynomials of b.
inline PolyDiffOperator compose(const PolyDiffOperator& a, const PolyDiffOperator& b) {
    PolyDiffOperator out;
    out.dim = a.dim;
    for (const auto& [alpha, p] : a.terms)
        for (const auto& [beta, q] : b.terms) {
            // enumerate alpha' <= alpha componentwise
            PolyMono ap(alpha.size(), 0);
            while (true) {
                Rat binom(1);
                for (size_t i = 0; i < alpha.size(); ++i)
                    binom *= Rat(int_binom(alpha[i], ap[i]));
                GradedPolynomial dq = q;
                for (size_t i = 0; i < ap.size() && !dq.is_zero(); ++i)
                    for (uint16_t e = 0; e < ap[i]; ++e) dq = dq.differentiated(static_cast<int>(i));
                if (!dq.is_zero()) {
                    PolyMono gamma(alpha.size());
                    for (size_t i = 0; i < alpha.size(); ++i)
                        gamma[i] = static_cast<uint16_t>(alpha[i] - ap[i] + beta[i]);
                    out.add_term(gamma, (p * dq).scaled(binom));
                }
                size_t pos = 0;
                while (pos < ap.size() && ap[pos] == alpha[pos]) {
                    ap[pos] = 0;
                    ++pos;
                }
                if (pos == ap.size()) break;
                ap[pos]++;
            }
        }
    return out;
}

inline GradedPolynomial apply_to_polynomial(const PolyDiffOperator& op, const GradedPolynomial& p) {
    return op.apply(p);
}

// ---------------------------------------------------------------------------
// Invariant vector fields from the cached BCH map
// ---------------------------------------------------------------------------

namespace detail {

using PolyVec = std::vector<GradedPolynomial>;

inline PolyVec bracket_poly(const GradedLieAlgebra& g, const PolyVec& a, const PolyVec& b) {
    PolyVec out(static_cast<size_t>(g.dim));
    for (int i = 0; i < g.dim; ++i) {
        if (a[static_cast<size_t>(i)].is_zero()) continue;
        for (int j = 0; j < g.dim; ++j) {
            if (b[static_cast<size_t>(j)].is_zero()) continue;
            for (const auto& [k, c] : g.brackets[static_cast<size_t>(i)][static_cast<size_t>(j)])
                out[static_cast<size_t>(k)] =
                    out[static_cast<size_t>(k)] +
                    (a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)]).scaled(c);
        }
    }
    return out;
}

inline PolyVec symbolic_coordinates(const GradedLieAlgebra& g) {
    PolyVec x(static_cast<size_t>(g.dim));
    for (int i = 0; i < g.dim; ++i) x[static_cast<size_t>(i)] = GradedPolynomial::coordinate(g.dim, i);
    return x;
}

inline PolyVec constant_vector(const GradedLieAlgebra& g, int basis_index) {
    PolyVec v(static_cast<size_t>(g.dim), GradedPolynomial());
    v[static_cast<size_t>(basis_index)] = GradedPolynomial::constant(g.dim, Rat(1));
    return v;
}

// d/ds BCH(args)|_{s=0} where exactly one Dynkin letter slot carries the
// s-scaled direction: keep the terms with exactly one such letter.
inline PolyVec bch_linear_part(const GradedLieAlgebra& g, const PolyVec& fixed, int basis_index,
                               uint8_t moving_letter) {
    PolyVec out(static_cast<size_t>(g.dim));
    const PolyVec dir = constant_vector(g, basis_index);
    for (const auto& term : g.bch) {
        int moving = 0;
        for (uint8_t l : term.letters) moving += (l == moving_letter) ? 1 : 0;
        if (moving != 1) continue;
        const auto& ls = term.letters;
        PolyVec v = (ls.back() == moving_letter) ? dir : fixed;
        for (size_t i = ls.size() - 1; i-- > 0;)
            v = bracket_poly(g, ls[i] == moving_letter ? dir : fixed, v);
        for (int k = 0; k < g.dim; ++k)
            out[static_cast<size_t>(k)] = out[static_cast<size_t>(k)] + v[static_cast<size_t>(k)].scaled(term.coeff);
    }
    return out;
}

inline PolyDiffOperator first_order_from_coeffs(const GradedLieAlgebra& g, const PolyVec& coeffs) {
    PolyDiffOperator op;
    op.dim = g.dim;
    for (int j = 0; j < g.dim; ++j) {
        if (coeffs[static_cast<size_t>(j)].is_zero()) continue;
        PolyMono alpha(static_cast<size_t>(g.dim), 0);
        alpha[static_cast<size_t>(j)] = 1;
        op.add_term(alpha, coeffs[static_cast<size_t>(j)]);
    }
    return op;
}

} // namespace detail

// Left-invariant field of a basis element: differentiate the group law in its
// second argument at the identity. Exact polynomial coefficients.
inline PolyDiffOperator left_field(const GradedLieAlgebra& g, int basis_index) {
    if (basis_index < 0 || basis_index >= g.dim) throw SpecError("left_field: index out of range");
    return detail::first_order_from_coeffs(
        g, detail::bch_linear_part(g, detail::symbolic_coordinates(g), basis_index, 1));
}

// Right-invariant mirror: differentiate in the first argument.
inline PolyDiffOperator right_field(const GradedLieAlgebra& g, int basis_index) {
    if (basis_index < 0 || basis_index >= g.dim) throw SpecError("right_field: index out of range");
    return detail::first_order_from_coeffs(
        g, detail::bch_linear_part(g, detail::symbolic_coordinates(g), basis_index, 0));
}

enum class FieldSide { Left, Right };

// X_gamma (or the right-invariant version) as a polynomial-coefficient
// operator: composition in the written order, X_{g1} applied last.
inline PolyDiffOperator realize_word(const GradedLieAlgebra& g, const std::vector<int>& word,
                                     FieldSide side = FieldSide::Left) {
    PolyDiffOperator op = PolyDiffOperator::identity(g.dim);
    for (size_t i = word.size(); i-- > 0;) {
        PolyDiffOperator f =
            (side == FieldSide::Left) ? left_field(g, word[i]) : right_field(g, word[i]);
        op = compose(f, op);
    }
    return op;
}

// y * x with y a fixed rational point and x symbolic: the left-translation
// coordinates as polynomials in x.
inline std::vector<GradedPolynomial> group_multiply_poly(const GradedLieAlgebra& g,
                                                         const GroupPoint& y) {
    detail::PolyVec x = detail::symbolic_coordinates(g);
    detail::PolyVec yc(static_cast<size_t>(g.dim));
    for (int i = 0; i < g.dim; ++i)
        yc[static_cast<size_t>(i)] = GradedPolynomial::constant(g.dim, y[static_cast<size_t>(i)]);
    detail::PolyVec out(static_cast<size_t>(g.dim));
    for (const auto& term : g.bch) {
        const auto& ls = term.letters;
        detail::PolyVec v = (ls.back() == 0) ? yc : x;
        for (size_t i = ls.size() - 1; i-- > 0;) v = detail::bracket_poly(g, ls[i] == 0 ? yc : x, v);
        for (int k = 0; k < g.dim; ++k)
            out[static_cast<size_t>(k)] = out[static_cast<size_t>(k)] + v[static_cast<size_t>(k)].scaled(term.coeff);
    }
    return out;
}

// f(z_1(x), .., z_dim(x)) for polynomial coordinates z.
inline GradedPolynomial compose_polynomial(const GradedPolynomial& f,
                                           const std::vector<GradedPolynomial>& z, int dim) {
    GradedPolynomial out;
    for (const auto& [m, c] : f.terms) {
        GradedPolynomial acc = GradedPolynomial::constant(dim, c);
        for (size_t i = 0; i < m.size(); ++i)
            for (uint16_t e = 0; e < m[i]; ++e) acc = acc * z[i];
        out = out + acc;
    }
    return out;
}

} // namespace carnot
