#pragma once

#include <map>
#include <optional>
#include <vector>

#include "carnot/operator.hpp"
#include "carnot/sampling.hpp"

namespace carnot {

// Multi-index beta in N_0^m with |beta| = order; the letter multiset of a
// word class.
struct MultiIndex {
    std::vector<uint16_t> e;

    bool operator==(const MultiIndex& o) const { return e == o.e; }
    bool operator<(const MultiIndex& o) const { return e < o.e; }
    int total() const {
        int t = 0;
        for (uint16_t v : e) t += v;
        return t;
    }
};

inline MultiIndex word_multiset(const Word& w, int m) {
    MultiIndex b;
    b.e.assign(static_cast<size_t>(m), 0);
    for (uint8_t l : w.letters) b.e[l]++;
    return b;
}

// Symmetrized symbol of an operator: the family B~_beta with
// Sym(L)(xi) = sum_beta B~_beta xi^beta.
struct SymbolMatrix {
    int m = 0;
    int dim_in = 1;
    int dim_out = 1;
    int order = 0;
    std::map<MultiIndex, RatMatrix> terms;

    void add_term(const MultiIndex& b, const RatMatrix& mat) {
        auto it = terms.find(b);
        if (it == terms.end()) {
            if (!mat.is_zero()) terms.emplace(b, mat);
        } else {
            RatMatrix s = it->second + mat;
            if (s.is_zero())
                terms.erase(it);
            else
                it->second = std::move(s);
        }
    }
    bool is_zero() const { return terms.empty(); }
};

// B~_beta = sum over words with letter multiset beta of the word's matrix.
inline SymbolMatrix symmetrize(const OperatorMatrix& l) {
    SymbolMatrix s;
    s.m = l.alg->m;
    s.dim_in = l.dim_in;
    s.dim_out = l.dim_out;
    s.order = l.order;
    for (const auto& [w, mat] : l.terms) s.add_term(word_multiset(w, s.m), mat);
    return s;
}

// Sym(L)(xi) evaluated at a rational point.
inline RatMatrix symbol_eval(const SymbolMatrix& s, const std::vector<Rat>& xi) {
    if (static_cast<int>(xi.size()) != s.m) throw SpecError("symbol_eval: xi must have m entries");
    RatMatrix out(s.dim_out, s.dim_in);
    for (const auto& [b, mat] : s.terms) {
        Rat mono(1);
        for (int i = 0; i < s.m; ++i)
            if (b.e[static_cast<size_t>(i)] > 0) mono *= rat_pow(xi[static_cast<size_t>(i)], b.e[static_cast<size_t>(i)]);
        out = out + mat.scaled(mono);
    }
    return out;
}

inline int symbol_rank_at(const SymbolMatrix& s, const std::vector<Rat>& xi) {
    return symbol_eval(s, xi).rank();
}

struct CocancelingVerdict {
    bool cocanceling = false;
    RatMatrix common_kernel; // columns span the common kernel (witness when not cocanceling)
};

// Cocanceling iff the B~_beta have trivial common kernel, i.e. the vertical
// stack of all B~_beta has full column rank.
inline CocancelingVerdict check_cocanceling(const SymbolMatrix& s) {
    RatMatrix stacked(0, s.dim_in);
    for (const auto& [b, mat] : s.terms) stacked = vstack(stacked, mat);
    CocancelingVerdict v;
    v.common_kernel = nullspace(stacked);
    v.cocanceling = (v.common_kernel.cols() == 0);
    return v;
}

struct CancelingVerdict {
    bool certified = false;
    RatMatrix candidate;                       // nonzero-dim common image subspace when not certified
    std::vector<std::vector<Rat>> samples;     // points whose images were intersected
};

// One-sided canceling test on an abelian group: intersects image subspaces
// A(xi)[V] at random nonzero rational points. Reaching {0} certifies the
// operator canceling (finite intersections over-approximate the full one);
// a candidate that survives `sample_budget` consecutive draws is returned
// not-certified, after an exact re-check that the candidate sits inside
// A(xi)[V] for each recorded sample.
inline CancelingVerdict check_canceling_euclidean(const SymbolMatrix& s, int sample_budget,
                                                  uint64_t seed) {
    if (sample_budget < 1) throw SpecError("canceling check needs a positive sample budget");
    RatSampler sampler(seed);
    CancelingVerdict v;
    std::optional<RatMatrix> inter;
    int stable = 0;
    int drawn = 0;
    while (true) {
        // standard unit vectors first: they catch symbols that vanish on
        // coordinate hyperplanes, then random nonzero rational points
        std::vector<Rat> xi;
        if (drawn < s.m) {
            xi.assign(static_cast<size_t>(s.m), Rat(0));
            xi[static_cast<size_t>(drawn)] = 1;
        } else {
            xi = sampler.nonzero_vector(s.m);
        }
        ++drawn;
        RatMatrix image = column_space_basis(symbol_eval(s, xi));
        if (!inter) {
            inter = image;
        } else {
            RatMatrix next = intersect_column_spaces(*inter, image);
            stable = (next.cols() == inter->cols()) ? stable + 1 : 0;
            inter = std::move(next);
        }
        v.samples.push_back(xi);
        if (inter->cols() == 0) {
            v.certified = true;
            // deterministic re-verification from the recorded samples
            RatMatrix recheck = column_space_basis(symbol_eval(s, v.samples.front()));
            for (size_t i = 1; i < v.samples.size(); ++i)
                recheck = intersect_column_spaces(recheck, column_space_basis(symbol_eval(s, v.samples[i])));
            if (recheck.cols() != 0) throw CertificateError("canceling re-check disagreed");
            return v;
        }
        if (stable >= sample_budget) {
            v.certified = false;
            v.candidate = *inter;
            for (const auto& pt : v.samples) {
                RatMatrix image_at = symbol_eval(s, pt);
                for (int c = 0; c < v.candidate.cols(); ++c)
                    if (!in_column_space(image_at, v.candidate.column(c)))
                        throw CertificateError("canceling candidate failed exact re-check");
            }
            return v;
        }
    }
}

inline CancelingVerdict check_canceling_euclidean(const OperatorMatrix& a, int sample_budget,
                                                  uint64_t seed) {
    if (a.alg->step != 1)
        throw SpecError("canceling is defined on abelian groups only (step 1), got step " +
                        std::to_string(a.alg->step));
    return check_canceling_euclidean(symmetrize(a), sample_budget, seed);
}

// Witness points for cocancellation on a ball: rational points inside the
// given ball whose symbol kernels already intersect trivially. Existence is
// guaranteed for cocanceling symbols on every ball; the draw is randomized,
// the verification exact. Returns nullopt if the budget is exhausted.
inline std::optional<std::vector<std::vector<Rat>>> cocanceling_witness_points(
    const SymbolMatrix& s, const std::vector<Rat>& center, const Rat& radius, uint64_t seed,
    int budget = 64) {
    if (static_cast<int>(center.size()) != s.m)
        throw SpecError("witness ball center must have m entries");
    if (sgn(radius) <= 0) throw SpecError("witness ball radius must be positive");
    RatSampler sampler(seed);
    std::vector<std::vector<Rat>> points;
    std::optional<RatMatrix> kernel;
    for (int draws = 0; draws < budget; ++draws) {
        std::vector<Rat> xi = sampler.point_in_ball(center, radius);
        RatMatrix k = nullspace(symbol_eval(s, xi));
        points.push_back(xi);
        kernel = kernel ? intersect_column_spaces(*kernel, k) : k;
        if (kernel->cols() == 0) {
            // exact re-verification over the recorded points
            RatMatrix re = nullspace(symbol_eval(s, points.front()));
            for (size_t i = 1; i < points.size(); ++i)
                re = intersect_column_spaces(re, nullspace(symbol_eval(s, points[i])));
            if (re.cols() != 0) throw CertificateError("witness-point re-check disagreed");
            return points;
        }
    }
    return std::nullopt;
}

} // namespace carnot
