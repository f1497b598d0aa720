#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "psaa/reproduce.hpp"
#include "psaa/stochastic.hpp"

using namespace psaa;

TEST_CASE("bernoulli sample mean concentrates") {
    DistributionSpec dist;
    dist.dist = IndependentComponents{{Bernoulli{0.5}}};
    const Eigen::MatrixXd s = sample(dist, 100000, 1);
    CHECK(std::abs(s.col(0).mean() - 0.5) <= 0.01);
}

TEST_CASE("joint normal sampling matches its mean within 5 sigma / sqrt(N)") {
    // The four-dimensional normal of the bivariate sextic example.
    const ProblemFile pf = builtin_problem("ex4.3");
    const long N = 100000;
    const Eigen::MatrixXd s = sample(pf.distribution, N, 42);
    REQUIRE(s.cols() == 4);
    for (int i = 0; i < 4; ++i) {
        const double sigma = std::sqrt(pf.distribution.component_variance(i));
        CHECK(std::abs(s.col(i).mean() - pf.distribution.component_mean(i)) <=
              5.0 * sigma / std::sqrt(static_cast<double>(N)));
    }
}

TEST_CASE("poisson sample variance is close to lambda") {
    DistributionSpec dist;
    dist.dist = IndependentComponents{{Poisson{2.0}}};
    const Eigen::MatrixXd s = sample(dist, 100000, 7);
    const double mean = s.col(0).mean();
    const double var = (s.col(0).array() - mean).square().sum() / (s.rows() - 1.0);
    CHECK(std::abs(var - 2.0) <= 0.1);
}

TEST_CASE("geometric support start controls the mean") {
    DistributionSpec d1;
    d1.dist = IndependentComponents{{Geometric{0.5, 1}}};
    CHECK(d1.component_mean(0) == doctest::Approx(2.0));
    const Eigen::MatrixXd s1 = sample(d1, 100000, 3);
    CHECK(std::abs(s1.col(0).mean() - 2.0) <= 0.05);

    DistributionSpec d0;
    d0.dist = IndependentComponents{{Geometric{0.5, 0}}};
    CHECK(d0.component_mean(0) == doctest::Approx(1.0));
    const Eigen::MatrixXd s0 = sample(d0, 100000, 3);
    CHECK(std::abs(s0.col(0).mean() - 1.0) <= 0.05);
}

TEST_CASE("sampling is deterministic in the seed") {
    DistributionSpec dist;
    dist.dist = IndependentComponents{{Poisson{2.0}, Uniform{0.0, 2.0}}};
    const Eigen::MatrixXd a = sample(dist, 500, 9);
    const Eigen::MatrixXd b = sample(dist, 500, 9);
    CHECK((a - b).lpNorm<Eigen::Infinity>() == 0.0);
    const Eigen::MatrixXd c = sample(dist, 500, 10);
    CHECK((a - c).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("distribution validation") {
    DistributionSpec bad;
    bad.dist = IndependentComponents{{Bernoulli{1.5}}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    JointNormal jn;
    jn.mean = Eigen::Vector2d(0.0, 0.0);
    jn.covariance.resize(2, 2);
    jn.covariance << 1.0, 2.0, 2.0, 1.0; // indefinite
    DistributionSpec nonpsd;
    nonpsd.dist = jn;
    CHECK_THROWS_AS(nonpsd.validate(), std::invalid_argument);
}

TEST_CASE("xi monomial means over explicit samples") {
    Eigen::MatrixXd s(3, 1);
    s << 1.0, 2.0, 3.0;
    const auto means = xi_monomial_means(s, {MultiIndex({1}), MultiIndex({2}), MultiIndex({0})});
    CHECK(means.at(MultiIndex({1})) == doctest::Approx(2.0));
    CHECK(means.at(MultiIndex({2})) == doctest::Approx(14.0 / 3.0));
    CHECK(means.at(MultiIndex({0})) == 1.0);
}

TEST_CASE("cross moments of the correlated normal converge to 1") {
    const ProblemFile pf = builtin_problem("ex4.6");
    const Eigen::MatrixXd s = sample(pf.distribution, 200000, 11);
    const auto means = xi_monomial_means(s, {MultiIndex({1, 0, 1}), MultiIndex({0, 1, 1})});
    // E(xi1 xi3) = E(xi2 xi3) = 1 from the covariance structure.
    CHECK(std::abs(means.at(MultiIndex({1, 0, 1})) - 1.0) <= 0.05);
    CHECK(std::abs(means.at(MultiIndex({0, 1, 1})) - 1.0) <= 0.05);
}

TEST_CASE("sample averages are invariant under row permutation") {
    DistributionSpec dist;
    dist.dist = IndependentComponents{{Uniform{0.0, 2.0}, Poisson{1.0}}};
    Eigen::MatrixXd s = sample(dist, 1001, 13);
    const std::vector<MultiIndex> betas = {MultiIndex({1, 0}), MultiIndex({2, 1}), MultiIndex({0, 3})};
    const auto base = xi_monomial_means(s, betas);
    // Reverse the rows: a nontrivial permutation.
    const Eigen::MatrixXd rev = s.colwise().reverse();
    const auto perm = xi_monomial_means(rev, betas);
    for (const auto &beta : betas) {
        const double a = base.at(beta), b = perm.at(beta);
        CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
    }
}

TEST_CASE("exact means reproduce the printed objective of ex4.3") {
    const ProblemFile pf = builtin_problem("ex4.3");
    const SparsePoly f = sample_average_poly(pf.objective, pf.preset_means("exact"));
    SparsePoly expect(2, {{{4, 2}, 1.0}, {{2, 4}, 1.0}, {{1, 3}, -3.0}, {{1, 1}, 1.0}});
    CHECK((f - expect).max_abs_coefficient() <= 1e-15);
}

TEST_CASE("exact means reproduce the printed objective of ex4.4") {
    const ProblemFile pf = builtin_problem("ex4.4");
    const SparsePoly f = sample_average_poly(pf.objective, pf.preset_means("exact"));
    // (x1^2 - x2^2)^2 + x3 (1 - x1^2 - x2^2) - x1 x2 (2 - x3)
    const auto x1 = SparsePoly::variable(3, 0), x2 = SparsePoly::variable(3, 1), x3 = SparsePoly::variable(3, 2);
    const SparsePoly one = SparsePoly::constant(3, 1.0);
    const SparsePoly a = x1 * x1 - x2 * x2;
    const SparsePoly expect = a * a + x3 * (one - x1 * x1 - x2 * x2) - x1 * x2 * (2.0 * one - x3);
    CHECK((f - expect).max_abs_coefficient() <= 1e-15);
}

TEST_CASE("fixed means from ex4.5 case I give the printed linear coefficient") {
    const ProblemFile pf = builtin_problem("ex4.5");
    const SparsePoly f = sample_average_poly(pf.objective, pf.preset_means("caseI"));
    // The only linear terms enter through (x1 - x4), whose coefficient is
    // -(s2 - 2 xibar) = -(6.43 - 2 * 2.11) = -2.21.
    const double c_x1 = f.coefficient(MultiIndex({1, 0, 0, 0}));
    const double c_x4 = f.coefficient(MultiIndex({0, 0, 0, 1}));
    CHECK(c_x1 == doctest::Approx(-2.21).epsilon(1e-12));
    CHECK(c_x4 == doctest::Approx(2.21).epsilon(1e-12));
}

TEST_CASE("missing xi monomial is reported") {
    const ProblemFile pf = builtin_problem("ex4.7");
    XiMonomialMeans partial = fixed_means({{{1}, 1.0}, {{2}, 1.33}});
    CHECK_THROWS_AS(sample_average_poly(pf.objective, partial), std::invalid_argument);
}

TEST_CASE("stochastic poly validation") {
    StochasticPoly bad;
    bad.n = 2;
    bad.r = 1;
    bad.terms.emplace_back(MultiIndex({1}), SparsePoly::variable(2, 0));
    bad.terms.emplace_back(MultiIndex({1}), SparsePoly::variable(2, 1));
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
