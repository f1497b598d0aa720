#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "psaa/moment_matrix.hpp"
#include "psaa/rng.hpp"

using namespace psaa;

namespace {

// Resolves one single-term layout entry back to its multi-index.
MultiIndex entry_index(const MatrixLayout &layout, int n, int i, int j) {
    const auto &terms = layout.entry(i, j);
    REQUIRE(terms.size() == 1);
    return grlex_unrank(n, 64, terms[0].y_rank);
}

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

Eigen::VectorXd coefficient_vector(const SparsePoly &a, const std::vector<MultiIndex> &labels) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<long>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) v[static_cast<long>(i)] = a.coefficient(labels[i]);
    return v;
}

} // namespace

TEST_CASE("localizing layout of x1x2 - x3^3 at d=3 matches the 4x4 display") {
    SparsePoly p(3, {{{1, 1, 0}, 1.0}, {{0, 0, 3}, -1.0}});
    const MatrixLayout layout = localizing_layout(p, 3, 3);
    REQUIRE(layout.side == 4);

    auto check_entry = [&](int i, int j, std::vector<int> plus, std::vector<int> minus) {
        const auto &terms = layout.entry(i, j);
        REQUIRE(terms.size() == 2);
        // Terms follow p's grlex order: the cubic (minus) sign comes second.
        CHECK(grlex_unrank(3, 8, terms[0].y_rank) == MultiIndex(plus));
        CHECK(terms[0].coefficient == 1.0);
        CHECK(grlex_unrank(3, 8, terms[1].y_rank) == MultiIndex(minus));
        CHECK(terms[1].coefficient == -1.0);
    };
    // Full printed matrix, row by row (upper triangle).
    check_entry(0, 0, {1, 1, 0}, {0, 0, 3});
    check_entry(0, 1, {2, 1, 0}, {1, 0, 3});
    check_entry(0, 2, {1, 2, 0}, {0, 1, 3});
    check_entry(0, 3, {1, 1, 1}, {0, 0, 4});
    check_entry(1, 1, {3, 1, 0}, {2, 0, 3});
    check_entry(1, 2, {2, 2, 0}, {1, 1, 3});
    check_entry(1, 3, {2, 1, 1}, {1, 0, 4});
    check_entry(2, 2, {1, 3, 0}, {0, 2, 3});
    check_entry(2, 3, {1, 2, 1}, {0, 1, 4});
    check_entry(3, 3, {1, 1, 2}, {0, 0, 5});
}

TEST_CASE("moment layout (n=3, d=2) matches the printed 10x10 moment matrix") {
    const MatrixLayout layout = moment_layout(3, 2);
    REQUIRE(layout.side == 10);
    CHECK(entry_index(layout, 3, 1, 2) == MultiIndex({1, 1, 0}));
    CHECK(entry_index(layout, 3, 4, 4) == MultiIndex({4, 0, 0}));
    // Structural identity with the printed display: entry (i,j) = y_{b_i + b_j}.
    for (int i = 0; i < 10; ++i)
        for (int j = i; j < 10; ++j)
            CHECK(entry_index(layout, 3, i, j) ==
                  layout.row_labels[static_cast<std::size_t>(i)].plus(layout.row_labels[static_cast<std::size_t>(j)]));
}

TEST_CASE("moment layout small cases") {
    const MatrixLayout m11 = moment_layout(1, 1);
    REQUIRE(m11.side == 2);
    CHECK(entry_index(m11, 1, 0, 0) == MultiIndex({0}));
    CHECK(entry_index(m11, 1, 0, 1) == MultiIndex({1}));
    CHECK(entry_index(m11, 1, 1, 1) == MultiIndex({2}));

    CHECK(moment_layout(2, 2).side == 6);

    // t = 0 single-label localizer.
    SparsePoly x1 = SparsePoly::variable(1, 0);
    const MatrixLayout lx = localizing_layout(x1, 1, 1);
    REQUIRE(lx.side == 1);
    CHECK(lx.entry(0, 0).size() == 1);
    CHECK(lx.entry(0, 0)[0].y_rank == 1);
}

TEST_CASE("assemble at point tms") {
    const MatrixLayout m = moment_layout(1, 1);
    const Eigen::MatrixXd a = assemble(m, tms_of_point({2.0}, 2));
    CHECK(a(0, 0) == doctest::Approx(1.0));
    CHECK(a(0, 1) == doctest::Approx(2.0));
    CHECK(a(1, 1) == doctest::Approx(4.0));

    SparsePoly xm1(1, {{{1}, 1.0}, {{0}, -1.0}});
    const Eigen::MatrixXd l = assemble(localizing_layout(xm1, 1, 1), tms_of_point({3.0}, 2));
    REQUIRE(l.rows() == 1);
    CHECK(l(0, 0) == doctest::Approx(2.0));

    SparsePoly p(3, {{{1, 1, 0}, 1.0}, {{0, 0, 3}, -1.0}});
    const Eigen::MatrixXd z = assemble(localizing_layout(p, 3, 3), tms_of_point({1.0, 1.0, 1.0}, 8));
    CHECK(z.lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("rank-one structure of assembled moment matrix") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        const int d = 1 + static_cast<int>(rng.next_u64() % 2);
        std::vector<double> u;
        for (int i = 0; i < n; ++i) u.push_back(rng.uniform(-1.5, 1.5));
        const MatrixLayout layout = moment_layout(n, d);
        const Eigen::MatrixXd m = assemble(layout, tms_of_point(u, 2 * d));
        Eigen::VectorXd xu(layout.side);
        for (int i = 0; i < layout.side; ++i) {
            double v = 1.0;
            const MultiIndex &alpha = layout.row_labels[static_cast<std::size_t>(i)];
            for (int k = 0; k < n; ++k)
                for (int e = 0; e < alpha[k]; ++e) v *= u[static_cast<std::size_t>(k)];
            xu[i] = v;
        }
        const Eigen::MatrixXd outer = xu * xu.transpose();
        for (int i = 0; i < layout.side; ++i)
            for (int j = 0; j < layout.side; ++j)
                CHECK(std::abs(m(i, j) - outer(i, j)) <= 1e-12 * (1.0 + std::abs(outer(i, j))));
    }
}

TEST_CASE("cone_spec block sides") {
    // Four shifted-coordinate linear constraints at d=4 (n=4).
    std::vector<SparsePoly> g;
    const SparsePoly one4 = SparsePoly::constant(4, 1.0);
    g.push_back(SparsePoly::variable(4, 0) - one4);
    g.push_back(SparsePoly::variable(4, 1) - 0.5 * one4);
    g.push_back(SparsePoly::variable(4, 2) - (1.0 / 3.0) * one4);
    g.push_back(SparsePoly::variable(4, 3) - 0.25 * one4);
    const ConeSpec spec = cone_spec(g, 4, 4);
    CHECK(spec.moment.side == 70);
    REQUIRE(spec.localizers.size() == 4);
    for (const auto &[gi, layout] : spec.localizers) CHECK(layout.side == 35);

    const ConeSpec trivial = cone_spec({}, 2, 1);
    CHECK(trivial.localizers.empty());
    CHECK(trivial.moment.side == 3);

    // Simplex constraints at d=2 (n=3): sides (10, 4,4,4,4).
    std::vector<SparsePoly> simplex;
    const SparsePoly one3 = SparsePoly::constant(3, 1.0);
    for (int i = 0; i < 3; ++i) simplex.push_back(SparsePoly::variable(3, i));
    simplex.push_back(one3 - SparsePoly::variable(3, 0) - SparsePoly::variable(3, 1) - SparsePoly::variable(3, 2));
    const ConeSpec s2 = cone_spec(simplex, 3, 2);
    CHECK(s2.moment.side == 10);
    for (const auto &[gi, layout] : s2.localizers) CHECK(layout.side == 4);
}

TEST_CASE("bilinear localizing identity on random data") {
    Rng rng(23);
    int done = 0;
    while (done < 200) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        const int d = 1 + static_cast<int>(rng.next_u64() % 2);
        SparsePoly p = random_poly(rng, n, 2 * d, 4);
        if (p.is_zero()) continue;
        const int t = d - (p.degree() + 1) / 2;
        const MatrixLayout layout = localizing_layout(p, n, d);

        Tms y(n, 2 * d);
        for (double &v : y.values()) v = rng.uniform(-1.0, 1.0);

        SparsePoly a = random_poly(rng, n, t, 3);
        SparsePoly b = random_poly(rng, n, t, 3);
        const Eigen::VectorXd va = coefficient_vector(a, layout.row_labels);
        const Eigen::VectorXd vb = coefficient_vector(b, layout.row_labels);
        const double lhs = va.dot(assemble(layout, y) * vb);
        const double rhs = riesz_apply(p * a * b, y);
        const double scale = 1.0 + std::abs(rhs);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
        ++done;
    }
}

TEST_CASE("feasible-point membership: assembled blocks are PSD at y = [u]_2d") {
    Rng rng(37);
    int done = 0;
    while (done < 200) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        const int d = 1 + static_cast<int>(rng.next_u64() % 2);
        std::vector<double> u;
        for (int i = 0; i < n; ++i) u.push_back(rng.uniform(-1.2, 1.2));
        // Random constraints shifted to hold at u.
        std::vector<SparsePoly> g;
        for (int k = 0; k < 2; ++k) {
            SparsePoly gi = random_poly(rng, n, 2, 3);
            const double margin = rng.uniform(0.0, 1.0);
            gi += SparsePoly::constant(n, margin - poly_eval(gi, u));
            g.push_back(gi);
        }
        const ConeSpec spec = cone_spec(g, n, d);
        const Tms y = tms_of_point(u, 2 * d);
        auto check_block = [&](const MatrixLayout &layout) {
            const Eigen::MatrixXd m = assemble(layout, y);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().minCoeff() >= -1e-10 * (1.0 + m.norm()));
        };
        check_block(spec.moment);
        for (const auto &[gi, layout] : spec.localizers) check_block(layout);
        ++done;
    }
}

TEST_CASE("degree overflow is rejected") {
    SparsePoly p(2, {{{3, 0}, 1.0}});
    CHECK_THROWS_AS(localizing_layout(p, 2, 1), std::invalid_argument);
}
