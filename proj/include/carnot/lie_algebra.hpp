#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "carnot/bch.hpp"
#include "carnot/errors.hpp"
#include "carnot/linalg.hpp"
#include "carnot/rational.hpp"
#include "carnot/tensor_words.hpp"

namespace carnot {

using SparseVec = std::vector<std::pair<int, Rat>>; // (basis index, coeff)

// A stratified Lie algebra with exact rational structure constants, in a
// weight-major basis: layer 1 first (the generators X_1..X_m), then layer 2,
// and so on. Immutable after construction; share via AlgebraPtr.
struct GradedLieAlgebra {
    std::vector<int> layer_dims;
    std::vector<int> weights; // weights[a] = layer of basis element a (1-based weight)
    int m = 0;                // dim of layer 1
    int step = 1;             // r
    int Q = 0;                // homogeneous dimension
    int dim = 0;
    std::string preset;           // e.g. "heisenberg(1)"
    std::string basis_convention; // embedded in reports
    std::vector<std::string> basis_names;
    // Full antisymmetric bracket table: brackets[a][b] = [e_a, e_b] sparse.
    std::vector<std::vector<SparseVec>> brackets;
    std::vector<BchTerm> bch; // Dynkin series truncated at weight = step

    // Straightening memo, installed lazily by uea.hpp.
    mutable std::mutex cache_mutex;
    mutable std::shared_ptr<void> pbw_cache;

    int layer_offset(int weight) const {
        int off = 0;
        for (int j = 1; j < weight; ++j) off += layer_dims[static_cast<size_t>(j - 1)];
        return off;
    }
};

using AlgebraPtr = std::shared_ptr<const GradedLieAlgebra>;

// Exact coordinates of a point of G in exponential coordinates.
using GroupPoint = std::vector<Rat>;

inline std::vector<Rat> bracket(const GradedLieAlgebra& g, const std::vector<Rat>& u,
                                const std::vector<Rat>& v) {
    if (static_cast<int>(u.size()) != g.dim || static_cast<int>(v.size()) != g.dim)
        throw SpecError("bracket: coefficient length does not match dim");
    std::vector<Rat> out(static_cast<size_t>(g.dim));
    for (int a = 0; a < g.dim; ++a) {
        if (rat_is_zero(u[static_cast<size_t>(a)])) continue;
        for (int b = 0; b < g.dim; ++b) {
            if (rat_is_zero(v[static_cast<size_t>(b)])) continue;
            const Rat f = u[static_cast<size_t>(a)] * v[static_cast<size_t>(b)];
            for (const auto& [k, c] : g.brackets[static_cast<size_t>(a)][static_cast<size_t>(b)])
                out[static_cast<size_t>(k)] += f * c;
        }
    }
    return out;
}

inline std::vector<Rat> basis_vector(const GradedLieAlgebra& g, int idx) {
    std::vector<Rat> v(static_cast<size_t>(g.dim));
    v[static_cast<size_t>(idx)] = 1;
    return v;
}

namespace detail {

inline std::string triple_str(int a, int b, int c) {
    std::ostringstream os;
    os << "(" << a + 1 << "," << b + 1 << "," << c + 1 << ")";
    return os.str();
}

// Exhaustive structural validation. Dimensions are desk-scale, so every
// basis pair and triple is checked.
inline void validate_algebra(const GradedLieAlgebra& g) {
    int q = 0, d = 0;
    for (size_t j = 0; j < g.layer_dims.size(); ++j) {
        if (g.layer_dims[j] <= 0) throw AlgebraError("layer " + std::to_string(j + 1) + " is empty");
        q += static_cast<int>(j + 1) * g.layer_dims[j];
        d += g.layer_dims[j];
    }
    if (d != g.dim || q != g.Q)
        throw AlgebraError("dimension bookkeeping mismatch (Q or dim)");

    // antisymmetry
    for (int a = 0; a < g.dim; ++a)
        for (int b = 0; b < g.dim; ++b) {
            std::vector<Rat> ab = bracket(g, basis_vector(g, a), basis_vector(g, b));
            std::vector<Rat> ba = bracket(g, basis_vector(g, b), basis_vector(g, a));
            for (int k = 0; k < g.dim; ++k)
                if (ab[static_cast<size_t>(k)] != -ba[static_cast<size_t>(k)])
                    throw AlgebraError("antisymmetry fails at pair (" + std::to_string(a + 1) + "," +
                                       std::to_string(b + 1) + ")");
        }

    // grading: [g_i, g_j] supported on weight i+j only
    for (int a = 0; a < g.dim; ++a)
        for (int b = 0; b < g.dim; ++b) {
            const int w = g.weights[static_cast<size_t>(a)] + g.weights[static_cast<size_t>(b)];
            for (const auto& [k, c] : g.brackets[static_cast<size_t>(a)][static_cast<size_t>(b)]) {
                if (rat_is_zero(c)) continue;
                if (w > g.step || g.weights[static_cast<size_t>(k)] != w)
                    throw AlgebraError("grading fails at pair (" + std::to_string(a + 1) + "," +
                                       std::to_string(b + 1) + "): support at weight " +
                                       std::to_string(g.weights[static_cast<size_t>(k)]) +
                                       ", expected " + std::to_string(w));
            }
        }

    // Jacobi, all triples
    for (int a = 0; a < g.dim; ++a)
        for (int b = a + 1; b < g.dim; ++b)
            for (int c = b + 1; c < g.dim; ++c) {
                std::vector<Rat> ea = basis_vector(g, a), eb = basis_vector(g, b), ec = basis_vector(g, c);
                std::vector<Rat> s = bracket(g, bracket(g, ea, eb), ec);
                std::vector<Rat> t = bracket(g, bracket(g, eb, ec), ea);
                std::vector<Rat> u = bracket(g, bracket(g, ec, ea), eb);
                for (int k = 0; k < g.dim; ++k) {
                    Rat sum = s[static_cast<size_t>(k)] + t[static_cast<size_t>(k)] + u[static_cast<size_t>(k)];
                    if (!rat_is_zero(sum))
                        throw AlgebraError("Jacobi fails at triple " + triple_str(a, b, c));
                }
            }

    // generation: layer j+1 spanned by [g_1, layer j]
    std::vector<std::vector<Rat>> prev;
    for (int i = 0; i < g.m; ++i) prev.push_back(basis_vector(g, i));
    for (int w = 2; w <= g.step; ++w) {
        std::vector<std::vector<Rat>> next;
        for (int i = 0; i < g.m; ++i)
            for (const auto& v : prev) next.push_back(bracket(g, basis_vector(g, i), v));
        const int off = g.layer_offset(w);
        const int ld = g.layer_dims[static_cast<size_t>(w - 1)];
        RatMatrix mat(ld, static_cast<int>(next.size()));
        for (size_t c = 0; c < next.size(); ++c)
            for (int r = 0; r < ld; ++r) mat.at(r, static_cast<int>(c)) = next[c][static_cast<size_t>(off + r)];
        if (mat.rank() != ld)
            throw AlgebraError("generation fails: layer " + std::to_string(w) +
                               " is not spanned by brackets of layer-1 elements");
        prev = std::move(next);
    }
}

inline void finish_algebra(GradedLieAlgebra& g) {
    g.m = g.layer_dims[0];
    g.step = static_cast<int>(g.layer_dims.size());
    g.dim = 0;
    g.Q = 0;
    g.weights.clear();
    for (size_t j = 0; j < g.layer_dims.size(); ++j) {
        g.dim += g.layer_dims[j];
        g.Q += static_cast<int>(j + 1) * g.layer_dims[j];
        for (int i = 0; i < g.layer_dims[j]; ++i) g.weights.push_back(static_cast<int>(j + 1));
    }
    g.bch = dynkin_series(g.step);
    validate_algebra(g);
}

inline std::vector<std::vector<SparseVec>> empty_table(int dim) {
    return std::vector<std::vector<SparseVec>>(static_cast<size_t>(dim),
                                               std::vector<SparseVec>(static_cast<size_t>(dim)));
}

inline void set_bracket(GradedLieAlgebra& g, int a, int b, SparseVec coeffs) {
    SparseVec neg;
    for (const auto& [k, c] : coeffs) neg.emplace_back(k, -c);
    g.brackets[static_cast<size_t>(a)][static_cast<size_t>(b)] = std::move(coeffs);
    g.brackets[static_cast<size_t>(b)][static_cast<size_t>(a)] = std::move(neg);
}

} // namespace detail

inline AlgebraPtr make_abelian(int n) {
    if (n < 1) throw SpecError("abelian(n) needs n >= 1");
    auto g = std::make_shared<GradedLieAlgebra>();
    g->layer_dims = {n};
    g->dim = n;
    g->brackets = detail::empty_table(n);
    g->preset = "abelian(" + std::to_string(n) + ")";
    g->basis_convention = "weight-major; layer 1 = X1..X" + std::to_string(n);
    for (int i = 0; i < n; ++i) g->basis_names.push_back("X" + std::to_string(i + 1));
    detail::finish_algebra(*g);
    return g;
}

inline AlgebraPtr make_heisenberg(int n) {
    if (n < 1) throw SpecError("heisenberg(n) needs n >= 1");
    auto g = std::make_shared<GradedLieAlgebra>();
    g->layer_dims = {2 * n, 1};
    g->dim = 2 * n + 1;
    g->brackets = detail::empty_table(g->dim);
    for (int i = 0; i < n; ++i)
        detail::set_bracket(*g, 2 * i, 2 * i + 1, SparseVec{{2 * n, Rat(1)}});
    g->preset = "heisenberg(" + std::to_string(n) + ")";
    g->basis_convention =
        "weight-major; generators X1..X" + std::to_string(2 * n) + ", center T, [X(2i-1),X(2i)] = T";
    for (int i = 0; i < 2 * n; ++i) g->basis_names.push_back("X" + std::to_string(i + 1));
    g->basis_names.push_back("T");
    detail::finish_algebra(*g);
    return g;
}

// Free nilpotent Lie algebra on m generators of step r, on a Hall basis.
// Structure constants come from Hall rewriting: brackets of basis elements
// are expanded in the free associative algebra and re-expressed over the
// Hall expansions of the right degree.
inline AlgebraPtr make_free_nilpotent(int m, int r) {
    if (m < 1 || r < 1) throw SpecError("free(m,r) needs m >= 1 and r >= 1");
    auto hall = hall_basis(m, r);
    std::vector<TensorPoly> exp_of(hall.size());
    for (size_t i = 0; i < hall.size(); ++i) exp_of[i] = hall_expansion(hall, static_cast<int>(i));

    auto g = std::make_shared<GradedLieAlgebra>();
    g->layer_dims.assign(static_cast<size_t>(r), 0);
    for (const auto& e : hall) g->layer_dims[static_cast<size_t>(e.degree - 1)]++;
    g->dim = static_cast<int>(hall.size());
    g->brackets = detail::empty_table(g->dim);
    for (int a = 0; a < g->dim; ++a)
        for (int b = a + 1; b < g->dim; ++b) {
            const int d = hall[static_cast<size_t>(a)].degree + hall[static_cast<size_t>(b)].degree;
            if (d > r) continue;
            TensorPoly br = tensor_commutator(exp_of[static_cast<size_t>(a)], exp_of[static_cast<size_t>(b)]);
            std::vector<Rat> coords = hall_coordinates(hall, exp_of, br, d);
            SparseVec sv;
            for (size_t k = 0; k < coords.size(); ++k)
                if (!rat_is_zero(coords[k])) sv.emplace_back(static_cast<int>(k), coords[k]);
            detail::set_bracket(*g, a, b, std::move(sv));
        }
    g->preset = "free(" + std::to_string(m) + "," + std::to_string(r) + ")";
    g->basis_convention = "weight-major; Hall basis, creation order within layers";
    for (size_t i = 0; i < hall.size(); ++i) g->basis_names.push_back(hall_name(hall, static_cast<int>(i)));
    detail::finish_algebra(*g);
    return g;
}

// Custom algebra from raw structure constants. `raw` lists (a, b, coeffs)
// with 1-based basis indices, a < b; the table is completed by antisymmetry
// and then validated exhaustively.
inline AlgebraPtr make_custom(const std::vector<int>& layer_dims,
                              const std::vector<std::tuple<int, int, std::vector<Rat>>>& raw) {
    if (layer_dims.empty()) throw SpecError("custom algebra needs at least one layer");
    auto g = std::make_shared<GradedLieAlgebra>();
    g->layer_dims = layer_dims;
    g->dim = 0;
    for (int d : layer_dims) g->dim += d;
    g->brackets = detail::empty_table(g->dim);
    for (const auto& [a1, b1, coeffs] : raw) {
        const int a = a1 - 1, b = b1 - 1;
        if (a < 0 || b < 0 || a >= g->dim || b >= g->dim)
            throw SpecError("custom bracket index out of range: (" + std::to_string(a1) + "," +
                            std::to_string(b1) + ")");
        if (a >= b) throw SpecError("custom brackets must list pairs with a < b");
        if (static_cast<int>(coeffs.size()) != g->dim)
            throw SpecError("custom bracket coefficient length must equal dim");
        SparseVec sv;
        for (size_t k = 0; k < coeffs.size(); ++k)
            if (!rat_is_zero(coeffs[k])) sv.emplace_back(static_cast<int>(k), coeffs[k]);
        detail::set_bracket(*g, a, b, std::move(sv));
    }
    g->preset = "custom";
    g->basis_convention = "weight-major; user-supplied order within layers";
    for (int i = 0; i < g->dim; ++i) g->basis_names.push_back("e" + std::to_string(i + 1));
    detail::finish_algebra(*g);
    return g;
}

// -------------------------------------------------------------------------
// Group operations in exponential coordinates.
// -------------------------------------------------------------------------

// Exact BCH product, evaluated from the cached Dynkin series. Exact because
// the algebra is nilpotent of step r and the series is truncated there.
inline GroupPoint group_multiply(const GradedLieAlgebra& g, const GroupPoint& x, const GroupPoint& y) {
    if (static_cast<int>(x.size()) != g.dim || static_cast<int>(y.size()) != g.dim)
        throw SpecError("group_multiply: coordinate length does not match dim");
    GroupPoint out(static_cast<size_t>(g.dim));
    for (const auto& term : g.bch) {
        const auto& ls = term.letters;
        std::vector<Rat> v = (ls.back() == 0) ? x : y;
        for (size_t i = ls.size() - 1; i-- > 0;) v = bracket(g, ls[i] == 0 ? x : y, v);
        for (int k = 0; k < g.dim; ++k) out[static_cast<size_t>(k)] += term.coeff * v[static_cast<size_t>(k)];
    }
    return out;
}

inline GroupPoint group_inverse(const GradedLieAlgebra&, const GroupPoint& x) {
    GroupPoint out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
    return out;
}

inline GroupPoint dilate(const GradedLieAlgebra& g, const Rat& lambda, const GroupPoint& x) {
    if (sgn(lambda) <= 0) throw SpecError("dilate: lambda must be positive");
    GroupPoint out(x.size());
    for (int k = 0; k < g.dim; ++k)
        out[static_cast<size_t>(k)] =
            rat_pow(lambda, static_cast<unsigned long>(g.weights[static_cast<size_t>(k)])) * x[static_cast<size_t>(k)];
    return out;
}

// The 2r!-th power of the homogeneous norm: sum_j |x_j|^(2 r!/j), an exact
// rational. Tests compare these powers to stay in rational arithmetic.
inline Rat homogeneous_norm_power(const GradedLieAlgebra& g, const GroupPoint& x) {
    const unsigned long rfact = int_factorial(static_cast<unsigned long>(g.step)).get_ui();
    Rat sum = 0;
    for (int j = 1; j <= g.step; ++j) {
        const int off = g.layer_offset(j);
        Rat block = 0;
        for (int i = 0; i < g.layer_dims[static_cast<size_t>(j - 1)]; ++i)
            block += x[static_cast<size_t>(off + i)] * x[static_cast<size_t>(off + i)];
        sum += rat_pow(block, rfact / static_cast<unsigned long>(j));
    }
    return sum;
}

inline double homogeneous_norm(const GradedLieAlgebra& g, const GroupPoint& x) {
    const double rfact = rat_double(Rat(int_factorial(static_cast<unsigned long>(g.step))));
    return std::pow(rat_double(homogeneous_norm_power(g, x)), 1.0 / (2.0 * rfact));
}

// Same norm on floating coordinates; the numerics hot path.
inline double homogeneous_norm_double(const GradedLieAlgebra& g, const double* x) {
    const double rfact = rat_double(Rat(int_factorial(static_cast<unsigned long>(g.step))));
    double sum = 0;
    int off = 0;
    for (int j = 1; j <= g.step; ++j) {
        double block = 0;
        for (int i = 0; i < g.layer_dims[static_cast<size_t>(j - 1)]; ++i, ++off) block += x[off] * x[off];
        sum += std::pow(block, rfact / j);
    }
    return std::pow(sum, 1.0 / (2.0 * rfact));
}

// det D(delta_lambda) = lambda^(sum of weights); the exponent equals Q by
// construction and the determinant is checked exactly for rational lambda.
inline int dilation_jacobian_exponent(const GradedLieAlgebra& g) {
    int s = 0;
    for (int w : g.weights) s += w;
    return s;
}

inline bool dilation_jacobian_matches_Q(const GradedLieAlgebra& g, const Rat& lambda) {
    if (dilation_jacobian_exponent(g) != g.Q) return false;
    Rat det(1);
    for (int w : g.weights) det *= rat_pow(lambda, static_cast<unsigned long>(w));
    return det == rat_pow(lambda, static_cast<unsigned long>(g.Q));
}

} // namespace carnot
