#include <doctest.h>

#include "carnot/poly_diff.hpp"
#include "carnot/uea.hpp"
#include "test_helpers.hpp"

using namespace carnot;
using carnot::testing::RatGen;

namespace {

PolyDiffOperator realize_element(const GradedLieAlgebra& g, const UeaElement& e) {
    PolyDiffOperator op;
    op.dim = g.dim;
    for (const auto& [mono, c] : e.terms) {
        std::vector<int> word(mono.idx.begin(), mono.idx.end());
        op = op + realize_word(g, word).scaled(c);
    }
    return op;
}

std::vector<PolyMono> monomials_up_to_degree(const GradedLieAlgebra& g, int max_deg) {
    std::vector<PolyMono> out;
    PolyMono m(static_cast<size_t>(g.dim), 0);
    // odometer over exponents bounded by max_deg in each slot; keep the
    // non-isotropically bounded ones
    while (true) {
        int d = 0;
        for (int i = 0; i < g.dim; ++i) d += g.weights[static_cast<size_t>(i)] * m[static_cast<size_t>(i)];
        if (d <= max_deg) out.push_back(m);
        size_t pos = 0;
        while (pos < m.size() && static_cast<int>(m[pos]) == max_deg) {
            m[pos] = 0;
            ++pos;
        }
        if (pos == m.size()) break;
        m[pos]++;
    }
    return out;
}

} // namespace

TEST_CASE("left fields on the Heisenberg group") {
    auto h1 = make_heisenberg(1);
    PolyDiffOperator x1 = left_field(*h1, 0);
    PolyDiffOperator x2 = left_field(*h1, 1);

    // X1 = d/da - (b/2) d/dt
    PolyDiffOperator expect1;
    expect1.dim = 3;
    expect1.add_term(PolyMono{1, 0, 0}, GradedPolynomial::constant(3, Rat(1)));
    expect1.add_term(PolyMono{0, 0, 1}, GradedPolynomial::coordinate(3, 1).scaled(make_rat(-1, 2)));
    CHECK(x1 == expect1);

    // X2 = d/db + (a/2) d/dt
    PolyDiffOperator expect2;
    expect2.dim = 3;
    expect2.add_term(PolyMono{0, 1, 0}, GradedPolynomial::constant(3, Rat(1)));
    expect2.add_term(PolyMono{0, 0, 1}, GradedPolynomial::coordinate(3, 0).scaled(make_rat(1, 2)));
    CHECK(x2 == expect2);

    // realized bracket [X1, X2] = d/dt
    PolyDiffOperator tfield;
    tfield.dim = 3;
    tfield.add_term(PolyMono{0, 0, 1}, GradedPolynomial::constant(3, Rat(1)));
    CHECK(compose(x1, x2) - compose(x2, x1) == tfield);
    CHECK(left_field(*h1, 2) == tfield); // the center realizes as d/dt
}

TEST_CASE("fields on the abelian group are plain partials") {
    auto ab = make_abelian(3);
    for (int i = 0; i < 3; ++i) {
        PolyDiffOperator expect;
        expect.dim = 3;
        PolyMono alpha{0, 0, 0};
        alpha[static_cast<size_t>(i)] = 1;
        expect.add_term(alpha, GradedPolynomial::constant(3, Rat(1)));
        CHECK(left_field(*ab, i) == expect);
        CHECK(right_field(*ab, i) == expect);
    }
}

TEST_CASE("right fields mirror left fields and commute with them") {
    auto h1 = make_heisenberg(1);
    // X1^R = d/da + (b/2) d/dt
    PolyDiffOperator expect;
    expect.dim = 3;
    expect.add_term(PolyMono{1, 0, 0}, GradedPolynomial::constant(3, Rat(1)));
    expect.add_term(PolyMono{0, 0, 1}, GradedPolynomial::coordinate(3, 1).scaled(make_rat(1, 2)));
    CHECK(right_field(*h1, 0) == expect);

    for (const auto& g : {make_heisenberg(1), make_free_nilpotent(2, 3)})
        for (int i = 0; i < g->m; ++i)
            for (int j = 0; j < g->m; ++j) {
                PolyDiffOperator l = left_field(*g, i), r = right_field(*g, j);
                CHECK((compose(l, r) - compose(r, l)).is_zero());
            }
}

TEST_CASE("realized structure constants match the bracket table") {
    for (const auto& g : {make_heisenberg(1), make_free_nilpotent(2, 3)})
        for (int a = 0; a < g->dim; ++a)
            for (int b = 0; b < g->dim; ++b) {
                PolyDiffOperator lhs =
                    compose(left_field(*g, a), left_field(*g, b)) -
                    compose(left_field(*g, b), left_field(*g, a));
                PolyDiffOperator rhs;
                rhs.dim = g->dim;
                for (const auto& [k, c] : g->brackets[static_cast<size_t>(a)][static_cast<size_t>(b)])
                    rhs = rhs + left_field(*g, k).scaled(c);
                CHECK(lhs == rhs);
            }
}

TEST_CASE("realize_word composes in order and is PBW-compatible") {
    auto h1 = make_heisenberg(1);
    CHECK(realize_word(*h1, {}) == PolyDiffOperator::identity(3));

    // X2 X1 = X1 X2 - T as realized operators
    PolyDiffOperator w21 = realize_word(*h1, {1, 0});
    PolyDiffOperator w12 = realize_word(*h1, {0, 1});
    CHECK(w21 == w12 - left_field(*h1, 2));

    RatGen gen(55);
    for (const auto& g : {make_heisenberg(1), make_free_nilpotent(2, 3)})
        for (int it = 0; it < 12; ++it) {
            std::vector<uint8_t> w;
            const int len = 1 + gen.pick(3);
            for (int i = 0; i < len; ++i) w.push_back(static_cast<uint8_t>(gen.pick(g->m)));
            std::vector<int> wi(w.begin(), w.end());
            CHECK(realize_word(*g, wi) == realize_element(*g, from_word(*g, w)));
        }
}

TEST_CASE("apply_to_polynomial on explicit inputs") {
    auto h1 = make_heisenberg(1);
    PolyDiffOperator x1 = left_field(*h1, 0);
    GradedPolynomial a = GradedPolynomial::coordinate(3, 0);
    GradedPolynomial t = GradedPolynomial::coordinate(3, 2);
    CHECK(apply_to_polynomial(x1, a) == GradedPolynomial::constant(3, Rat(1)));
    CHECK(apply_to_polynomial(x1, t) == GradedPolynomial::coordinate(3, 1).scaled(make_rat(-1, 2)));
}

TEST_CASE("generators lower the non-isotropic degree by one") {
    auto h1 = make_heisenberg(1);
    for (const PolyMono& m : monomials_up_to_degree(*h1, 4)) {
        GradedPolynomial p;
        p.add_term(m, Rat(1));
        const int d = p.nonisotropic_degree(*h1);
        for (int i = 0; i < h1->m; ++i) {
            GradedPolynomial der = apply_to_polynomial(left_field(*h1, i), p);
            if (!der.is_zero()) CHECK(der.nonisotropic_degree(*h1) == d - 1);
        }
    }
}

TEST_CASE("words of length k annihilate polynomials of degree below k") {
    for (const auto& g : {make_heisenberg(1), make_free_nilpotent(2, 3)}) {
        for (int k = 1; k <= 4; ++k) {
            // all words gamma of length k over the generators
            std::vector<std::vector<int>> words{{}};
            for (int p = 0; p < k; ++p) {
                std::vector<std::vector<int>> next;
                for (const auto& w : words)
                    for (int l = 0; l < g->m; ++l) {
                        auto v = w;
                        v.push_back(l);
                        next.push_back(v);
                    }
                words = std::move(next);
            }
            std::vector<PolyDiffOperator> ops;
            for (const auto& w : words) ops.push_back(realize_word(*g, w));
            for (const PolyMono& m : monomials_up_to_degree(*g, k - 1)) {
                GradedPolynomial p;
                p.add_term(m, Rat(1));
                for (const auto& op : ops) CHECK(apply_to_polynomial(op, p).is_zero());
            }
        }
    }
}

TEST_CASE("kernel fact instance: X_gamma t = 0 for all length-3 words on H1") {
    auto h1 = make_heisenberg(1);
    GradedPolynomial t = GradedPolynomial::coordinate(3, 2); // degree 2 < 3
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                CHECK(apply_to_polynomial(realize_word(*h1, {a, b, c}), t).is_zero());
}

TEST_CASE("left invariance under sampled rational translations") {
    RatGen gen(56);
    for (const auto& g : {make_heisenberg(1), make_free_nilpotent(2, 3)}) {
        for (int it = 0; it < 6; ++it) {
            GroupPoint y = gen.point(*g, 4, 3);
            std::vector<GradedPolynomial> z = group_multiply_poly(*g, y);
            for (const PolyMono& m : monomials_up_to_degree(*g, 2)) {
                GradedPolynomial phi;
                phi.add_term(m, Rat(1));
                GradedPolynomial translated = compose_polynomial(phi, z, g->dim);
                for (int i = 0; i < g->m; ++i) {
                    GradedPolynomial lhs = apply_to_polynomial(left_field(*g, i), translated);
                    GradedPolynomial rhs =
                        compose_polynomial(apply_to_polynomial(left_field(*g, i), phi), z, g->dim);
                    CHECK(lhs == rhs);
                }
            }
        }
    }
}
