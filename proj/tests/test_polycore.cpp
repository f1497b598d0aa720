#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "psaa/rng.hpp"
#include "psaa/tms.hpp"

using namespace psaa;

namespace {

SparsePoly random_poly(Rng &rng, int n, int maxdeg, int terms) {
    SparsePoly f(n);
    for (int t = 0; t < terms; ++t) {
        std::vector<int> exps(static_cast<std::size_t>(n), 0);
        int budget = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(maxdeg + 1));
        for (int i = 0; i < n && budget > 0; ++i) {
            const int e = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(budget + 1));
            exps[static_cast<std::size_t>(i)] = e;
            budget -= e;
        }
        f.add_term(MultiIndex(exps), rng.uniform(-2.0, 2.0));
    }
    return f;
}

} // namespace

TEST_CASE("monomial_basis ordering and length") {
    const auto b31 = monomial_basis(3, 1);
    REQUIRE(b31.size() == 4);
    CHECK(b31[0].exps() == std::vector<int>{0, 0, 0});
    CHECK(b31[1].exps() == std::vector<int>{1, 0, 0});
    CHECK(b31[2].exps() == std::vector<int>{0, 1, 0});
    CHECK(b31[3].exps() == std::vector<int>{0, 0, 1});

    const auto b12 = monomial_basis(1, 2);
    REQUIRE(b12.size() == 3);
    CHECK(b12[0].exps() == std::vector<int>{0});
    CHECK(b12[1].exps() == std::vector<int>{1});
    CHECK(b12[2].exps() == std::vector<int>{2});

    // Degree-2 tail of the n=3 basis, in the printed column order of M_2[y].
    const auto b32 = monomial_basis(3, 2);
    REQUIRE(b32.size() == 10);
    CHECK(b32[4].exps() == std::vector<int>{2, 0, 0});
    CHECK(b32[5].exps() == std::vector<int>{1, 1, 0});
    CHECK(b32[6].exps() == std::vector<int>{1, 0, 1});
    CHECK(b32[7].exps() == std::vector<int>{0, 2, 0});
    CHECK(b32[8].exps() == std::vector<int>{0, 1, 1});
    CHECK(b32[9].exps() == std::vector<int>{0, 0, 2});

    for (int n = 1; n <= 4; ++n)
        for (int k = 0; k <= 5; ++k)
            CHECK(static_cast<std::int64_t>(monomial_basis(n, k).size()) == basis_size(n, k));
}

TEST_CASE("monomial_basis is strictly increasing under grlex") {
    for (int n = 1; n <= 4; ++n) {
        const auto basis = monomial_basis(n, 5);
        for (std::size_t i = 0; i + 1 < basis.size(); ++i) CHECK(grlex_less(basis[i], basis[i + 1]));
    }
}

TEST_CASE("grlex rank examples") {
    CHECK(grlex_rank(MultiIndex({0, 0, 0})) == 0);
    CHECK(grlex_rank(MultiIndex({0})) == 0);
    CHECK(grlex_rank(MultiIndex({1, 1, 0})) == 5);
    // Frozen from enumerating monomial_basis(2, 2): (0,2) sits last.
    CHECK(grlex_rank(MultiIndex({0, 2})) == 5);
}

TEST_CASE("grlex rank/unrank round-trip exhaustively for n<=6, k<=8") {
    for (int n = 1; n <= 6; ++n) {
        const int k = 8;
        const auto basis = monomial_basis(n, k);
        for (std::size_t r = 0; r < basis.size(); ++r) {
            CHECK(grlex_rank(basis[r]) == static_cast<std::int64_t>(r));
            CHECK(grlex_unrank(n, k, static_cast<std::int64_t>(r)) == basis[r]);
        }
    }
    CHECK_THROWS_AS(grlex_unrank(2, 2, 6), std::out_of_range);
    CHECK_THROWS_AS(grlex_unrank(2, 2, -1), std::out_of_range);
}

TEST_CASE("poly_eval examples") {
    // x1 x2 - x3^3 at (1,2,1)
    SparsePoly f(3, {{{1, 1, 0}, 1.0}, {{0, 0, 3}, -1.0}});
    CHECK(poly_eval(f, {1.0, 2.0, 1.0}) == doctest::Approx(1.0));

    // Exact objective of the bivariate sextic example at its minimizer.
    SparsePoly g(2, {{{4, 2}, 1.0}, {{2, 4}, 1.0}, {{1, 3}, -3.0}, {{1, 1}, 1.0}});
    CHECK(poly_eval(g, {0.3442, 3.6558}) == doctest::Approx(-27.844).epsilon(4e-4));

    // Trivariate quartic at (1,1,1).
    SparsePoly h(3);
    const auto x1 = SparsePoly::variable(3, 0), x2 = SparsePoly::variable(3, 1), x3 = SparsePoly::variable(3, 2);
    h = x1 * x2 * x3 * (x1 + x2 + x3) + x1 * x2 + x2 * x3 + x1 * x3;
    CHECK(poly_eval(h, {1.0, 1.0, 1.0}) == doctest::Approx(6.0));

    CHECK_THROWS_AS(poly_eval(f, {1.0}), std::invalid_argument);
}

TEST_CASE("riesz functional") {
    // f = 3 + 2 x1 x2 against y with y_000 = 1, y_110 = 5.
    SparsePoly f(3, {{{0, 0, 0}, 3.0}, {{1, 1, 0}, 2.0}});
    Tms y(3, 2);
    y.set(MultiIndex({0, 0, 0}), 1.0);
    y.set(MultiIndex({1, 1, 0}), 5.0);
    CHECK(riesz_apply(f, y) == doctest::Approx(13.0));

    CHECK(riesz_apply(SparsePoly(3), y) == 0.0);

    SparsePoly deg3(3, {{{3, 0, 0}, 1.0}});
    CHECK_THROWS_AS(riesz_apply(deg3, y), std::invalid_argument);
}

TEST_CASE("riesz at a point tms equals evaluation") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        const int d = 1 + static_cast<int>(rng.next_u64() % 2);
        SparsePoly f = random_poly(rng, n, 2 * d, 6);
        std::vector<double> u;
        for (int i = 0; i < n; ++i) u.push_back(rng.uniform(-1.5, 1.5));
        const double direct = poly_eval(f, u);
        const double viariesz = riesz_apply(f, tms_of_point(u, 2 * d));
        CHECK(std::abs(viariesz - direct) <= 1e-12 * (1.0 + std::abs(direct)));
    }
}

TEST_CASE("tms_of_point examples") {
    const Tms y1 = tms_of_point({2.0}, 2);
    CHECK(y1.values() == std::vector<double>{1.0, 2.0, 4.0});

    const Tms y0 = tms_of_point({0.0, 0.0}, 2);
    CHECK(y0[0] == 1.0);
    for (std::size_t i = 1; i < y0.values().size(); ++i) CHECK(y0.values()[i] == 0.0);

    const Tms yone = tms_of_point({1.0, 1.0}, 2);
    REQUIRE(yone.values().size() == 6);
    for (double v : yone.values()) CHECK(v == 1.0);
}

TEST_CASE("relaxation_degree") {
    // Degree-7 objective with linear constraints -> d = 4.
    SparsePoly f7(4, {{{6, 0, 0, 1}, 1.0}});
    std::vector<SparsePoly> glin;
    for (int i = 0; i < 4; ++i) glin.push_back(SparsePoly::variable(4, i));
    CHECK(relaxation_degree(f7, glin) == 4);

    SparsePoly fc = SparsePoly::constant(1, 5.0);
    CHECK(relaxation_degree(fc, {SparsePoly::variable(1, 0)}) == 1);

    // Quartic objective, cubic constraint -> d = 2.
    SparsePoly f4(3, {{{2, 1, 1}, 1.0}});
    SparsePoly gc(3, {{{1, 1, 1}, -1.0}, {{0, 0, 0}, 8.0}});
    CHECK(relaxation_degree(f4, {gc}) == 2);
}

TEST_CASE("polynomial arithmetic agrees with evaluation") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        SparsePoly f = random_poly(rng, n, 3, 5);
        SparsePoly g = random_poly(rng, n, 3, 5);
        std::vector<double> u;
        for (int i = 0; i < n; ++i) u.push_back(rng.uniform(-1.2, 1.2));
        const double fu = poly_eval(f, u), gu = poly_eval(g, u);
        CHECK(std::abs(poly_eval(f * g, u) - fu * gu) <= 1e-10 * (1.0 + std::abs(fu * gu)));
        CHECK(std::abs(poly_eval(f + g, u) - (fu + gu)) <= 1e-10 * (1.0 + std::abs(fu + gu)));
        CHECK(std::abs(poly_eval(2.5 * f, u) - 2.5 * fu) <= 1e-10 * (1.0 + std::abs(fu)));
    }
}

TEST_CASE("zero coefficients are pruned") {
    SparsePoly f(2);
    f.add_term(MultiIndex({1, 0}), 1.0);
    f.add_term(MultiIndex({1, 0}), -1.0);
    CHECK(f.is_zero());
    CHECK(f.degree() == 0);
    f.add_term(MultiIndex({0, 1}), 0.0);
    CHECK(f.is_zero());
}

TEST_CASE("differentiate") {
    // d/dx1 (x1^3 x2 + x2) = 3 x1^2 x2
    SparsePoly f(2, {{{3, 1}, 1.0}, {{0, 1}, 1.0}});
    const SparsePoly df = f.differentiate(0);
    CHECK(df.coefficient(MultiIndex({2, 1})) == doctest::Approx(3.0));
    CHECK(df.terms().size() == 1);
}
