#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "carnot/annihilator.hpp"
#include "carnot/poly_diff.hpp"

namespace carnot {

inline int carnot_threads() {
    if (const char* env = std::getenv("CARNOT_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Deterministic pairwise (tree) summation; the result depends only on the
// order of the input, never on worker count.
inline double pairwise_sum(const std::vector<double>& v, size_t lo, size_t hi) {
    if (hi - lo <= 8) {
        double s = 0;
        for (size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v, 0, v.size()); }

// (sum |v|^p vol)^(1/p), max for p = infinity.
inline double lp_norm(const std::vector<double>& samples, double p, double cell_volume) {
    if (std::isinf(p)) {
        double mx = 0;
        for (double v : samples) mx = std::max(mx, std::abs(v));
        return mx;
    }
    if (p < 1) throw SpecError("lp_norm needs p >= 1");
    std::vector<double> powed(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) powed[i] = std::pow(std::abs(samples[i]), p);
    return std::pow(pairwise_sum(powed) * cell_volume, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Test functions: polynomial bumps (1 - |x|^2)^p_+ with optional rational
// dilation/translation precomposition. C^{p-1}, compactly supported, and all
// derivatives are exact polynomials on the support.
// ---------------------------------------------------------------------------

struct BumpFunction {
    int power = 4;
    Rat lambda = Rat(1);      // precompose with delta_lambda
    std::vector<Rat> shift;   // per-coordinate shift of the argument; empty = 0
    Rat amplitude = Rat(1);   // overall scale; 0 gives the degenerate u = 0

    std::string descriptor() const {
        std::ostringstream os;
        if (amplitude != Rat(1)) os << "(" << rat_str(amplitude) << ") ";
        os << "(1-|x|^2)^" << power;
        if (lambda != Rat(1)) os << " o delta_" << rat_str(lambda);
        bool shifted = false;
        for (const auto& s : shift) shifted = shifted || !rat_is_zero(s);
        if (shifted) os << " shifted";
        return os.str();
    }
};

struct QuadratureGrid {
    Rat half_width = Rat(1); // box [-h, h]^dim
    int n = 16;              // cells per axis; even keeps nodes off the origin
};

struct RefinePoint {
    int n = 0;
    double lhs = 0, rhs = 0, ratio = 0;
};

struct InequalityReport {
    std::string inequality_id;
    double lhs = 0, rhs = 0, ratio = 0;
    bool degenerate = false;
    int grid_n = 0;
    double box_half_width = 0;
    std::string function_desc;
    std::vector<RefinePoint> history;
};

namespace detail {

// The argument map s_i(x) = lambda^{w_i} x_i - shift_i of the bump.
struct BumpGeometry {
    std::vector<Rat> scale, shift;
    GradedPolynomial gate; // |s(x)|^2; support is gate <= 1
    GradedPolynomial base; // (1 - |s(x)|^2)^power
};

inline BumpGeometry bump_geometry(const GradedLieAlgebra& g, const BumpFunction& b) {
    if (sgn(b.lambda) <= 0) throw SpecError("bump dilation must be positive");
    BumpGeometry geo;
    geo.scale.resize(static_cast<size_t>(g.dim));
    geo.shift.resize(static_cast<size_t>(g.dim));
    for (int i = 0; i < g.dim; ++i) {
        geo.scale[static_cast<size_t>(i)] =
            rat_pow(b.lambda, static_cast<unsigned long>(g.weights[static_cast<size_t>(i)]));
        geo.shift[static_cast<size_t>(i)] =
            (static_cast<size_t>(i) < b.shift.size()) ? -b.shift[static_cast<size_t>(i)] : Rat(0);
    }
    GradedPolynomial norm2;
    for (int i = 0; i < g.dim; ++i) {
        GradedPolynomial s = GradedPolynomial::coordinate(g.dim, i).scaled(geo.scale[static_cast<size_t>(i)]) +
                             GradedPolynomial::constant(g.dim, geo.shift[static_cast<size_t>(i)]);
        norm2 = norm2 + s * s;
    }
    geo.gate = norm2;
    geo.base = poly_pow(GradedPolynomial::constant(g.dim, Rat(1)) - norm2, b.power, g.dim)
                   .scaled(b.amplitude);
    return geo;
}

inline void check_support_in_box(const GradedLieAlgebra& g, const BumpFunction& b,
                                 const QuadratureGrid& grid) {
    // support of x -> bump(s(x)) is |lambda^{w_i} x_i - shift_i| <= 1 blockwise;
    // a conservative per-coordinate bound must fit inside the box
    for (int i = 0; i < g.dim; ++i) {
        Rat sh = (static_cast<size_t>(i) < b.shift.size()) ? b.shift[static_cast<size_t>(i)] : Rat(0);
        Rat bound = (Rat(1) + abs(sh)) /
                    rat_pow(b.lambda, static_cast<unsigned long>(g.weights[static_cast<size_t>(i)]));
        if (bound > grid.half_width)
            throw SpecError("support violation: bump support exceeds the quadrature box");
    }
}

// All words of length len over the generators as realized operators.
inline std::vector<PolyDiffOperator> realized_gradient_block(const GradedLieAlgebra& g, int len) {
    std::vector<std::vector<int>> words{{}};
    for (int p = 0; p < len; ++p) {
        std::vector<std::vector<int>> next;
        for (const auto& w : words)
            for (int l = 0; l < g.m; ++l) {
                auto v = w;
                v.push_back(l);
                next.push_back(v);
            }
        words = std::move(next);
    }
    std::vector<PolyDiffOperator> ops;
    ops.reserve(words.size());
    for (const auto& w : words) ops.push_back(realize_word(g, w));
    return ops;
}

// Deterministic block-parallel evaluation over the midpoint grid. Each
// fixed-size block is summed sequentially into its own slot; slots are folded
// pairwise afterwards, so results do not depend on the thread count.
struct GridAccumulator {
    size_t n_acc;
    std::function<void(const double* coords, const std::vector<std::vector<double>>& pows,
                       bool inside, double* acc)>
        visit;
};

inline std::vector<double> evaluate_on_grid(const GradedLieAlgebra& g, const QuadratureGrid& grid,
                                            const GradedPolynomial& gate, int max_exp,
                                            const GridAccumulator& f) {
    const int dim = g.dim;
    const double h = rat_double(grid.half_width);
    const int n = grid.n;
    size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= static_cast<size_t>(n);
    const size_t block_size = 8192;
    const size_t n_blocks = (total + block_size - 1) / block_size;
    std::vector<std::vector<double>> partials(n_blocks, std::vector<double>(f.n_acc, 0.0));

    std::atomic<size_t> next_block{0};
    auto worker = [&]() {
        std::vector<double> coords(static_cast<size_t>(dim));
        std::vector<std::vector<double>> pows(static_cast<size_t>(dim),
                                              std::vector<double>(static_cast<size_t>(max_exp) + 1, 1.0));
        while (true) {
            const size_t blk = next_block.fetch_add(1);
            if (blk >= n_blocks) return;
            double* acc = partials[blk].data();
            const size_t lo = blk * block_size, hi = std::min(total, lo + block_size);
            for (size_t idx = lo; idx < hi; ++idx) {
                size_t rem = idx;
                for (int d = 0; d < dim; ++d) {
                    const int cell = static_cast<int>(rem % static_cast<size_t>(n));
                    rem /= static_cast<size_t>(n);
                    coords[static_cast<size_t>(d)] = -h + (2.0 * cell + 1.0) * h / n;
                }
                for (int d = 0; d < dim; ++d) {
                    double* p = pows[static_cast<size_t>(d)].data();
                    p[0] = 1.0;
                    for (int e = 1; e <= max_exp; ++e) p[e] = p[e - 1] * coords[static_cast<size_t>(d)];
                }
                const bool inside = gate.eval_double(pows) < 1.0;
                f.visit(coords.data(), pows, inside, acc);
            }
        }
    };
    const int nthreads = std::min<int>(carnot_threads(), static_cast<int>(n_blocks));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    // pairwise fold over blocks in index order
    std::vector<double> out(f.n_acc, 0.0);
    for (size_t a = 0; a < f.n_acc; ++a) {
        std::vector<double> slots(n_blocks);
        for (size_t b = 0; b < n_blocks; ++b) slots[b] = partials[b][a];
        out[a] = pairwise_sum(slots);
    }
    return out;
}

struct PreparedExample {
    OperatorMatrix A;
    std::vector<GradedPolynomial> u;        // dimV components
    std::vector<GradedPolynomial> rhs_polys; // dimE components of A(D)u
    GradedPolynomial gate;
    int order = 0;
};

inline PreparedExample prepare_example(const AlgebraPtr& alg, const ExampleId& id,
                                       const BumpFunction& bump, const QuadratureGrid& grid) {
    const GradedLieAlgebra& g = *alg;
    PreparedExample prep;
    prep.A = example_operator(id, alg);
    prep.order = prep.A.order;
    if (bump.power < prep.order + 2)
        throw SpecError("bump power must be at least operator order + 2 (got " +
                        std::to_string(bump.power) + " for order " + std::to_string(prep.order) + ")");
    check_support_in_box(g, bump, grid);
    BumpGeometry geo = bump_geometry(g, bump);
    prep.gate = geo.gate;

    prep.u.assign(static_cast<size_t>(prep.A.dim_in), GradedPolynomial());
    if (id.kind == ExampleId::Korn) {
        for (int j = 0; j < prep.A.dim_in; ++j)
            prep.u[static_cast<size_t>(j)] = GradedPolynomial::coordinate(g.dim, j) * geo.base;
    } else {
        prep.u[0] = geo.base;
    }

    prep.rhs_polys.assign(static_cast<size_t>(prep.A.dim_out), GradedPolynomial());
    for (const auto& [w, mat] : prep.A.terms) {
        std::vector<int> wi(w.letters.begin(), w.letters.end());
        PolyDiffOperator op = realize_word(g, wi);
        for (int v = 0; v < prep.A.dim_in; ++v) {
            GradedPolynomial dv = apply_to_polynomial(op, prep.u[static_cast<size_t>(v)]);
            if (dv.is_zero()) continue;
            for (int row = 0; row < prep.A.dim_out; ++row) {
                const Rat& c = mat.at(row, v);
                if (rat_is_zero(c)) continue;
                prep.rhs_polys[static_cast<size_t>(row)] =
                    prep.rhs_polys[static_cast<size_t>(row)] + dv.scaled(c);
            }
        }
    }
    return prep;
}

inline std::vector<GradedPolynomial> lhs_block(const GradedLieAlgebra& g,
                                               const PreparedExample& prep, int ell) {
    std::vector<GradedPolynomial> block;
    for (const auto& op : realized_gradient_block(g, prep.order - ell))
        for (const auto& uv : prep.u) block.push_back(apply_to_polynomial(op, uv));
    return block;
}

inline int max_exponent_of(const std::vector<const GradedPolynomial*>& polys) {
    int mx = 1;
    for (const auto* p : polys) mx = std::max(mx, p->max_exponent());
    return mx;
}

} // namespace detail

// Sobolev-type report: LHS = || D^{k-1} u ||_{L^{Q/(Q-1)}}, RHS = sum of the
// L^1 norms of the components of A(D)u, both by midpoint quadrature with all
// derivatives taken symbolically on the polynomial piece.
inline InequalityReport sobolev_report(const AlgebraPtr& alg, const ExampleId& id,
                                       const BumpFunction& bump, const QuadratureGrid& grid) {
    const GradedLieAlgebra& g = *alg;
    detail::PreparedExample prep = detail::prepare_example(alg, id, bump, grid);
    std::vector<GradedPolynomial> lhs_polys = detail::lhs_block(g, prep, 1);

    std::vector<const GradedPolynomial*> all{&prep.gate};
    for (const auto& p : lhs_polys) all.push_back(&p);
    for (const auto& p : prep.rhs_polys) all.push_back(&p);
    const int max_exp = detail::max_exponent_of(all);

    const double pstar = static_cast<double>(g.Q) / (g.Q - 1);
    detail::GridAccumulator acc;
    acc.n_acc = 1 + prep.rhs_polys.size();
    acc.visit = [&](const double*, const std::vector<std::vector<double>>& pows, bool inside,
                    double* out) {
        if (!inside) return;
        double block2 = 0;
        for (const auto& p : lhs_polys) {
            const double v = p.eval_double(pows);
            block2 += v * v;
        }
        out[0] += std::pow(block2, pstar / 2.0);
        for (size_t r = 0; r < prep.rhs_polys.size(); ++r)
            out[1 + r] += std::abs(prep.rhs_polys[r].eval_double(pows));
    };
    std::vector<double> sums = detail::evaluate_on_grid(g, grid, prep.gate, max_exp, acc);

    double vol = 1;
    for (int d = 0; d < g.dim; ++d) vol *= 2.0 * rat_double(grid.half_width) / grid.n;

    InequalityReport rep;
    rep.inequality_id = "sobolev(" + id.str() + ")";
    rep.lhs = std::pow(sums[0] * vol, 1.0 / pstar);
    rep.rhs = 0;
    for (size_t r = 1; r < sums.size(); ++r) rep.rhs += sums[r] * vol;
    rep.degenerate = (rep.lhs == 0.0 && rep.rhs == 0.0);
    rep.ratio = rep.degenerate ? std::numeric_limits<double>::quiet_NaN() : rep.lhs / rep.rhs;
    rep.grid_n = grid.n;
    rep.box_half_width = rat_double(grid.half_width);
    rep.function_desc = bump.descriptor();
    return rep;
}

// Hardy-type report: LHS = ( int (||x||^{Q-l} |D^{k-l} u|)^p ||x||^{-Q} dx )^{1/p},
// RHS as in the Sobolev report. Midpoint nodes never sit at the origin, so
// the singular weight is always finite at the nodes.
inline InequalityReport hardy_report(const AlgebraPtr& alg, const ExampleId& id,
                                     const BumpFunction& bump, int ell, double p,
                                     const QuadratureGrid& grid) {
    const GradedLieAlgebra& g = *alg;
    detail::PreparedExample prep = detail::prepare_example(alg, id, bump, grid);
    const int k = prep.order;
    if (ell < 1 || ell > std::min(k, g.Q - 1))
        throw SpecError("hardy: ell must satisfy 1 <= ell <= min(k, Q-1)");
    const double pmax = static_cast<double>(g.Q) / (g.Q - ell);
    if (p < 1 || p >= pmax)
        throw SpecError("hardy: p must satisfy 1 <= p < Q/(Q-ell) = " + std::to_string(pmax));
    if (grid.n % 2 != 0) throw SpecError("hardy: grid subdivisions must be even to avoid the origin");

    std::vector<GradedPolynomial> lhs_polys = detail::lhs_block(g, prep, ell);
    std::vector<const GradedPolynomial*> all{&prep.gate};
    for (const auto& q : lhs_polys) all.push_back(&q);
    for (const auto& q : prep.rhs_polys) all.push_back(&q);
    const int max_exp = detail::max_exponent_of(all);

    detail::GridAccumulator acc;
    acc.n_acc = 1 + prep.rhs_polys.size();
    acc.visit = [&](const double* coords, const std::vector<std::vector<double>>& pows, bool inside,
                    double* out) {
        if (!inside) return;
        double block2 = 0;
        for (const auto& q : lhs_polys) {
            const double v = q.eval_double(pows);
            block2 += v * v;
        }
        const double norm = homogeneous_norm_double(g, coords);
        out[0] += std::pow(std::pow(norm, g.Q - ell) * std::sqrt(block2), p) / std::pow(norm, g.Q);
        for (size_t r = 0; r < prep.rhs_polys.size(); ++r)
            out[1 + r] += std::abs(prep.rhs_polys[r].eval_double(pows));
    };
    std::vector<double> sums = detail::evaluate_on_grid(g, grid, prep.gate, max_exp, acc);

    double vol = 1;
    for (int d = 0; d < g.dim; ++d) vol *= 2.0 * rat_double(grid.half_width) / grid.n;

    InequalityReport rep;
    rep.inequality_id = "hardy(" + id.str() + ", ell=" + std::to_string(ell) + ")";
    rep.lhs = std::pow(sums[0] * vol, 1.0 / p);
    rep.rhs = 0;
    for (size_t r = 1; r < sums.size(); ++r) rep.rhs += sums[r] * vol;
    rep.degenerate = (rep.lhs == 0.0 && rep.rhs == 0.0);
    rep.ratio = rep.degenerate ? std::numeric_limits<double>::quiet_NaN() : rep.lhs / rep.rhs;
    rep.grid_n = grid.n;
    rep.box_half_width = rat_double(grid.half_width);
    rep.function_desc = bump.descriptor();
    return rep;
}

struct RefineStudy {
    std::vector<RefinePoint> rows;
    bool pass = false;
    bool degenerate = false;
    double tolerance = 0.03;
};

// Runs the report producer for each refinement level and flags PASS when all
// successive ratios agree within the relative tolerance. Degenerate reports
// (0/0 ratios) are flagged instead of passed.
inline RefineStudy refine_study(const std::function<InequalityReport(int)>& producer,
                                const std::vector<int>& levels, double tol = 0.03) {
    if (levels.size() < 2) throw SpecError("refine_study needs at least two levels");
    for (size_t i = 1; i < levels.size(); ++i)
        if (levels[i] <= levels[i - 1]) throw SpecError("refine_study levels must be increasing");
    RefineStudy study;
    study.tolerance = tol;
    for (int n : levels) {
        InequalityReport rep = producer(n);
        study.degenerate = study.degenerate || rep.degenerate;
        study.rows.push_back({n, rep.lhs, rep.rhs, rep.ratio});
    }
    if (study.degenerate) {
        study.pass = false;
        return study;
    }
    study.pass = true;
    for (size_t i = 1; i < study.rows.size(); ++i) {
        const double a = study.rows[i - 1].ratio, b = study.rows[i].ratio;
        if (!(std::abs(a - b) <= tol * std::abs(b))) study.pass = false;
    }
    return study;
}

inline std::string refine_csv(const RefineStudy& study) {
    std::ostringstream os;
    os << "n,lhs,rhs,ratio\n";
    os.precision(12);
    for (const auto& row : study.rows)
        os << row.n << "," << row.lhs << "," << row.rhs << "," << row.ratio << "\n";
    return os.str();
}

} // namespace carnot
