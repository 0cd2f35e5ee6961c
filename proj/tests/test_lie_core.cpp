#include <doctest.h>

#include "carnot/lie_algebra.hpp"
#include "carnot/tensor_words.hpp"
#include "test_helpers.hpp"

using namespace carnot;
using carnot::testing::RatGen;
using carnot::testing::witt_dimension;

TEST_CASE("rational parsing and formatting") {
    CHECK(parse_rat("2/3") == make_rat(2, 3));
    CHECK(parse_rat("-7") == make_rat(-7));
    CHECK(parse_rat("4/6") == make_rat(2, 3));
    CHECK(rat_str(make_rat(-4, 6)) == "-2/3");
    CHECK(rat_str(make_rat(5, 1)) == "5");
    CHECK_THROWS_AS(parse_rat("1/0"), SpecError);
    CHECK_THROWS_AS(parse_rat("x"), SpecError);
    CHECK_THROWS_AS(parse_rat(""), SpecError);
    CHECK(rat_pow(make_rat(-2, 3), 3) == make_rat(-8, 27));
    CHECK(int_binom(5, 2) == 10);
}

TEST_CASE("exact linear algebra basics") {
    RatMatrix a(2, 3);
    a.at(0, 0) = 1; a.at(0, 1) = 2; a.at(0, 2) = 3;
    a.at(1, 0) = 2; a.at(1, 1) = 4; a.at(1, 2) = 6;
    CHECK(a.rank() == 1);
    RatMatrix ker = nullspace(a);
    CHECK(ker.cols() == 2);
    for (int k = 0; k < ker.cols(); ++k)
        for (int r = 0; r < a.rows(); ++r) {
            Rat s = 0;
            for (int c = 0; c < a.cols(); ++c) s += a.at(r, c) * ker.at(c, k);
            CHECK(rat_is_zero(s));
        }

    RatMatrix id = RatMatrix::identity(3);
    CHECK(id.rank() == 3);
    CHECK(nullspace(id).cols() == 0);

    // intersection of two planes in R^3 sharing one line
    RatMatrix u(3, 2), w(3, 2);
    u.at(0, 0) = 1; u.at(1, 1) = 1;            // span{e1, e2}
    w.at(1, 0) = 1; w.at(2, 1) = 1;            // span{e2, e3}
    RatMatrix inter = intersect_column_spaces(u, w);
    CHECK(inter.cols() == 1);
    CHECK(rat_is_zero(inter.at(0, 0)));
    CHECK(!rat_is_zero(inter.at(1, 0)));
    CHECK(rat_is_zero(inter.at(2, 0)));

    std::vector<Rat> b{Rat(3), Rat(6)};
    auto sol = solve(a, b);
    REQUIRE(sol.has_value());
    Rat lhs = a.at(0, 0) * (*sol)[0] + a.at(0, 1) * (*sol)[1] + a.at(0, 2) * (*sol)[2];
    CHECK(lhs == Rat(3));
    std::vector<Rat> bad{Rat(1), Rat(0)};
    CHECK(!solve(a, bad).has_value());
}

TEST_CASE("presets: dimensions and homogeneous dimension") {
    auto h1 = make_heisenberg(1);
    CHECK(h1->m == 2);
    CHECK(h1->step == 2);
    CHECK(h1->layer_dims == std::vector<int>{2, 1});
    CHECK(h1->Q == 4);

    auto ab = make_abelian(3);
    CHECK(ab->m == 3);
    CHECK(ab->step == 1);
    CHECK(ab->Q == 3);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) CHECK(ab->brackets[a][b].empty());

    auto f23 = make_free_nilpotent(2, 3);
    CHECK(f23->layer_dims == std::vector<int>{2, 1, 2});
    CHECK(f23->Q == 10);

    CHECK(make_heisenberg(2)->Q == 6);
}

TEST_CASE("free nilpotent layer dimensions match the Witt formula") {
    for (auto [m, r] : {std::pair{2, 3}, std::pair{2, 5}, std::pair{3, 3}}) {
        auto g = make_free_nilpotent(m, r);
        for (int d = 1; d <= r; ++d)
            CHECK(g->layer_dims[d - 1] == witt_dimension(m, d));
    }
}

TEST_CASE("bracket on presets") {
    auto h1 = make_heisenberg(1);
    auto x1 = basis_vector(*h1, 0), x2 = basis_vector(*h1, 1), t = basis_vector(*h1, 2);
    CHECK(bracket(*h1, x1, x2) == t);
    std::vector<Rat> zero(3);
    CHECK(bracket(*h1, x1, t) == zero);

    // [X1,[X1,X2]] is the Hall generator [[X2,X1],X1] of weight 3
    auto f23 = make_free_nilpotent(2, 3);
    auto inner = bracket(*f23, basis_vector(*f23, 0), basis_vector(*f23, 1));
    auto outer = bracket(*f23, basis_vector(*f23, 0), inner);
    CHECK(outer == basis_vector(*f23, 3));
    CHECK(f23->basis_names[3] == "[[X2,X1],X1]");

    CHECK_THROWS_AS(bracket(*h1, std::vector<Rat>(2), std::vector<Rat>(3)), SpecError);
}

TEST_CASE("custom algebra validation accepts the Heisenberg constants") {
    std::vector<std::tuple<int, int, std::vector<Rat>>> raw;
    raw.emplace_back(1, 2, std::vector<Rat>{Rat(0), Rat(0), Rat(1)});
    auto g = make_custom({2, 1}, raw);
    CHECK(g->Q == 4);
    CHECK(bracket(*g, basis_vector(*g, 0), basis_vector(*g, 1)) == basis_vector(*g, 2));
}

TEST_CASE("custom algebra validation rejects violations with a witness") {
    // grading violation: [X1,X2] has weight-1 support
    std::vector<std::tuple<int, int, std::vector<Rat>>> graded_bad;
    graded_bad.emplace_back(1, 2, std::vector<Rat>{Rat(1), Rat(0), Rat(0)});
    CHECK_THROWS_WITH_AS(static_cast<void>(make_custom({2, 1}, graded_bad)),
                         doctest::Contains("grading"), AlgebraError);

    // generation violation: second layer not spanned by brackets
    std::vector<std::tuple<int, int, std::vector<Rat>>> gen_bad;
    gen_bad.emplace_back(1, 2, std::vector<Rat>{Rat(0), Rat(0), Rat(1), Rat(0)});
    CHECK_THROWS_WITH_AS(static_cast<void>(make_custom({2, 2}, gen_bad)),
                         doctest::Contains("generation"), AlgebraError);

    // Jacobi violation on the triple (1,2,3)
    std::vector<std::tuple<int, int, std::vector<Rat>>> jac_bad;
    std::vector<Rat> z(5), w(5);
    z[3] = 1;
    w[4] = 1;
    jac_bad.emplace_back(1, 2, z);
    jac_bad.emplace_back(3, 4, w);
    CHECK_THROWS_WITH_AS(static_cast<void>(make_custom({3, 1, 1}, jac_bad)),
                         doctest::Contains("Jacobi fails at triple (1,2,3)"), AlgebraError);
}

TEST_CASE("dilation scales layers by weight and has Jacobian lambda^Q") {
    auto h1 = make_heisenberg(1);
    GroupPoint x{Rat(1), Rat(1), Rat(1)};
    GroupPoint d = dilate(*h1, Rat(2), x);
    CHECK(d == GroupPoint{Rat(2), Rat(2), Rat(4)});
    CHECK(dilate(*h1, Rat(1), x) == x);
    CHECK_THROWS_AS(dilate(*h1, Rat(0), x), SpecError);
    CHECK_THROWS_AS(dilate(*h1, Rat(-2), x), SpecError);

    for (const auto& g : {make_heisenberg(1), make_abelian(3), make_free_nilpotent(2, 3)}) {
        CHECK(dilation_jacobian_exponent(*g) == g->Q);
        CHECK(dilation_jacobian_matches_Q(*g, make_rat(3, 2)));
    }
}

TEST_CASE("homogeneous norm: values and degree-1 homogeneity") {
    auto h1 = make_heisenberg(1);
    CHECK(homogeneous_norm(*h1, GroupPoint{Rat(1), Rat(0), Rat(0)}) == doctest::Approx(1.0));
    CHECK(homogeneous_norm(*h1, GroupPoint{Rat(0), Rat(0), Rat(1)}) == doctest::Approx(1.0));
    // ((a^2+b^2)^2 + t^2)^(1/4)
    CHECK(homogeneous_norm(*h1, GroupPoint{Rat(1), Rat(1), Rat(0)}) == doctest::Approx(std::sqrt(2.0)));

    RatGen gen(7);
    for (const auto& g : {make_heisenberg(1), make_free_nilpotent(2, 3)}) {
        const unsigned long two_rfact =
            2 * int_factorial(static_cast<unsigned long>(g->step)).get_ui();
        for (int it = 0; it < 20; ++it) {
            GroupPoint x = gen.point(*g);
            Rat lambda = make_rat(1 + gen.pick(9), 1 + gen.pick(5));
            // exact statement on 2r!-th powers
            CHECK(homogeneous_norm_power(*g, dilate(*g, lambda, x)) ==
                  rat_pow(lambda, two_rfact) * homogeneous_norm_power(*g, x));
            // floating statement within 1e-12 relative
            double lhs = homogeneous_norm(*g, dilate(*g, lambda, x));
            double rhs = rat_double(lambda) * homogeneous_norm(*g, x);
            if (rhs != 0.0) CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-12);
        }
    }
}

TEST_CASE("group law on the Heisenberg group") {
    auto h1 = make_heisenberg(1);
    GroupPoint x{Rat(1), Rat(0), Rat(0)}, y{Rat(0), Rat(1), Rat(0)};
    CHECK(group_multiply(*h1, x, y) == GroupPoint{Rat(1), Rat(1), make_rat(1, 2)});

    RatGen gen(11);
    GroupPoint zero(3);
    for (int it = 0; it < 25; ++it) {
        GroupPoint p = gen.point(*h1);
        CHECK(group_multiply(*h1, p, group_inverse(*h1, p)) == zero);
        CHECK(group_multiply(*h1, p, zero) == p);
        CHECK(group_multiply(*h1, zero, p) == p);
    }
}

TEST_CASE("group law is associative and dilation is an automorphism") {
    auto f23 = make_free_nilpotent(2, 3);
    RatGen gen(13);
    for (int it = 0; it < 100; ++it) {
        GroupPoint x = gen.point(*f23, 6, 4), y = gen.point(*f23, 6, 4), z = gen.point(*f23, 6, 4);
        CHECK(group_multiply(*f23, group_multiply(*f23, x, y), z) ==
              group_multiply(*f23, x, group_multiply(*f23, y, z)));
    }
    for (int it = 0; it < 20; ++it) {
        GroupPoint x = gen.point(*f23, 6, 4), y = gen.point(*f23, 6, 4);
        Rat lambda = make_rat(1 + gen.pick(7), 1 + gen.pick(4));
        CHECK(dilate(*f23, lambda, group_multiply(*f23, x, y)) ==
              group_multiply(*f23, dilate(*f23, lambda, x), dilate(*f23, lambda, y)));
    }
}

namespace {

TensorPoly truncated_exp(const TensorPoly& p, size_t max_len) {
    TensorPoly acc = TensorPoly::word({}); // 1
    TensorPoly pw = TensorPoly::word({});
    Rat fact(1);
    for (size_t n = 1; n <= max_len; ++n) {
        pw = (pw * p).truncated_above(max_len);
        fact *= Rat(static_cast<long>(n));
        acc = acc + pw.scaled(Rat(1) / fact);
    }
    return acc;
}

} // namespace

TEST_CASE("Dynkin series reproduces exp(x)exp(y) in the free tensor algebra") {
    for (int w = 1; w <= 5; ++w) {
        auto terms = dynkin_series(w);
        TensorPoly x = TensorPoly::letter(0), y = TensorPoly::letter(1);
        TensorPoly z;
        for (const auto& t : terms) {
            TensorPoly v = TensorPoly::letter(t.letters.back());
            for (size_t i = t.letters.size() - 1; i-- > 0;)
                v = tensor_commutator(TensorPoly::letter(t.letters[i]), v);
            z = z + v.scaled(t.coeff);
        }
        TensorPoly lhs = (truncated_exp(x, static_cast<size_t>(w)) * truncated_exp(y, static_cast<size_t>(w)))
                             .truncated_above(static_cast<size_t>(w));
        TensorPoly rhs = truncated_exp(z, static_cast<size_t>(w));
        CHECK((lhs - rhs).is_zero());
    }
}
