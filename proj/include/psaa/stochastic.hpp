#ifndef PSAA_STOCHASTIC_HPP
#define PSAA_STOCHASTIC_HPP

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "psaa/sparse_poly.hpp"

namespace psaa {

struct Bernoulli {
    double p;
};
struct Geometric {
    double p;
    int support_start = 1;
};
struct Poisson {
    double lambda;
};
struct Uniform {
    double a;
    double b;
};

using ComponentDist = std::variant<Bernoulli, Geometric, Poisson, Uniform>;

struct IndependentComponents {
    std::vector<ComponentDist> components;
};

struct JointNormal {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

/// Distribution of the random vector xi: either independent classical
/// components or a joint normal with given mean and covariance.
struct DistributionSpec {
    std::variant<IndependentComponents, JointNormal> dist;

    int dimension() const;
    /// Throws std::invalid_argument when a parameter is out of range or the
    /// covariance has no Cholesky factorization (PSD within 1e-12).
    void validate() const;
    double component_mean(int i) const;
    double component_variance(int i) const;
};

/// F(x, xi) as a finite sum of xi-monomial x-polynomial products. The beta=0
/// term carries the deterministic part.
struct StochasticPoly {
    int n = 0; // decision dimension
    int r = 0; // random dimension
    std::vector<std::pair<MultiIndex, SparsePoly>> terms;

    void validate() const;
    std::vector<MultiIndex> betas() const;
    int x_degree() const;
};

struct XiMonomialMeans {
    enum class Provenance { Sampled, Fixed };
    std::map<std::vector<int>, double> means;
    Provenance provenance = Provenance::Fixed;
    long sample_count = 0;
    std::uint64_t seed = 0;

    double at(const MultiIndex &beta) const;
};

/// N i.i.d. draws of xi, one per row; deterministic in the seed. JointNormal
/// sampling uses mu + L z with L the lower Cholesky factor.
Eigen::MatrixXd sample(const DistributionSpec &dist, long count, std::uint64_t seed);

/// Sample means of xi^beta for each requested beta. The per-beta reduction is
/// order-independent (summands are sorted), so row permutations cannot change
/// the result bitwise.
XiMonomialMeans xi_monomial_means(const Eigen::MatrixXd &samples, const std::vector<MultiIndex> &betas);

XiMonomialMeans fixed_means(const std::map<std::vector<int>, double> &means);

/// f_N = sum_beta mean(beta) * poly_beta; a bit-exact function of the means.
SparsePoly sample_average_poly(const StochasticPoly &F, const XiMonomialMeans &means);

} // namespace psaa

#endif
