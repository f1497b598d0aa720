#include "psaa/stochastic.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "psaa/rng.hpp"

namespace psaa {

int DistributionSpec::dimension() const {
    if (const auto *ind = std::get_if<IndependentComponents>(&dist))
        return static_cast<int>(ind->components.size());
    return static_cast<int>(std::get<JointNormal>(dist).mean.size());
}

namespace {

// Lower Cholesky factor, accepting PSD matrices within a 1e-12 relative slack.
Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd &p) {
    if (p.rows() != p.cols()) throw std::invalid_argument("covariance must be square");
    if ((p - p.transpose()).lpNorm<Eigen::Infinity>() > 1e-12 * (1.0 + p.lpNorm<Eigen::Infinity>()))
        throw std::invalid_argument("covariance must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(p);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    // Singular PSD: build the factor from the clamped eigendecomposition.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
    const double scale = 1.0 + std::abs(es.eigenvalues().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-12 * scale)
        throw std::invalid_argument("covariance is not positive semidefinite");
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal();
}

} // namespace

void DistributionSpec::validate() const {
    if (const auto *ind = std::get_if<IndependentComponents>(&dist)) {
        if (ind->components.empty()) throw std::invalid_argument("distribution has no components");
        for (const auto &comp : ind->components) {
            std::visit(
                [](const auto &c) {
                    using T = std::decay_t<decltype(c)>;
                    if constexpr (std::is_same_v<T, Bernoulli>) {
                        if (!(c.p > 0.0 && c.p < 1.0)) throw std::invalid_argument("bernoulli: p outside (0,1)");
                    } else if constexpr (std::is_same_v<T, Geometric>) {
                        if (!(c.p > 0.0 && c.p < 1.0)) throw std::invalid_argument("geometric: p outside (0,1)");
                    } else if constexpr (std::is_same_v<T, Poisson>) {
                        if (!(c.lambda > 0.0)) throw std::invalid_argument("poisson: lambda must be positive");
                    } else {
                        if (!(c.a < c.b)) throw std::invalid_argument("uniform: requires a < b");
                    }
                },
                comp);
        }
        return;
    }
    const auto &jn = std::get<JointNormal>(dist);
    if (jn.mean.size() == 0) throw std::invalid_argument("joint normal has dimension zero");
    if (jn.covariance.rows() != jn.mean.size() || jn.covariance.cols() != jn.mean.size())
        throw std::invalid_argument("joint normal covariance shape mismatch");
    psd_cholesky(jn.covariance);
}

double DistributionSpec::component_mean(int i) const {
    if (const auto *ind = std::get_if<IndependentComponents>(&dist)) {
        return std::visit(
            [](const auto &c) -> double {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, Bernoulli>) return c.p;
                else if constexpr (std::is_same_v<T, Geometric>) return (1.0 - c.p) / c.p + c.support_start;
                else if constexpr (std::is_same_v<T, Poisson>) return c.lambda;
                else return 0.5 * (c.a + c.b);
            },
            ind->components[static_cast<std::size_t>(i)]);
    }
    return std::get<JointNormal>(dist).mean[i];
}

double DistributionSpec::component_variance(int i) const {
    if (const auto *ind = std::get_if<IndependentComponents>(&dist)) {
        return std::visit(
            [](const auto &c) -> double {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, Bernoulli>) return c.p * (1.0 - c.p);
                else if constexpr (std::is_same_v<T, Geometric>) return (1.0 - c.p) / (c.p * c.p);
                else if constexpr (std::is_same_v<T, Poisson>) return c.lambda;
                else return (c.b - c.a) * (c.b - c.a) / 12.0;
            },
            ind->components[static_cast<std::size_t>(i)]);
    }
    return std::get<JointNormal>(dist).covariance(i, i);
}

void StochasticPoly::validate() const {
    std::set<std::vector<int>> seen;
    for (const auto &[beta, poly] : terms) {
        if (beta.size() != r) throw std::invalid_argument("StochasticPoly: xi exponent length mismatch");
        if (poly.vars() != n) throw std::invalid_argument("StochasticPoly: x variable count mismatch");
        if (poly.is_zero()) throw std::invalid_argument("StochasticPoly: zero polynomial term");
        if (!seen.insert(beta.exps()).second) throw std::invalid_argument("StochasticPoly: duplicate xi monomial");
    }
}

std::vector<MultiIndex> StochasticPoly::betas() const {
    std::vector<MultiIndex> out;
    out.reserve(terms.size());
    for (const auto &[beta, poly] : terms) out.push_back(beta);
    return out;
}

int StochasticPoly::x_degree() const {
    int d = 0;
    for (const auto &[beta, poly] : terms) d = std::max(d, poly.degree());
    return d;
}

double XiMonomialMeans::at(const MultiIndex &beta) const {
    if (beta.is_zero()) return 1.0;
    auto it = means.find(beta.exps());
    if (it == means.end()) throw std::invalid_argument("XiMonomialMeans: missing xi monomial");
    return it->second;
}

Eigen::MatrixXd sample(const DistributionSpec &dist, long count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
    dist.validate();
    const int r = dist.dimension();
    Eigen::MatrixXd out(count, r);
    Rng rng(seed);
    if (const auto *ind = std::get_if<IndependentComponents>(&dist.dist)) {
        for (long k = 0; k < count; ++k) {
            for (int i = 0; i < r; ++i) {
                out(k, i) = std::visit(
                    [&rng](const auto &c) -> double {
                        using T = std::decay_t<decltype(c)>;
                        if constexpr (std::is_same_v<T, Bernoulli>) return rng.bernoulli(c.p);
                        else if constexpr (std::is_same_v<T, Geometric>) return rng.geometric(c.p, c.support_start);
                        else if constexpr (std::is_same_v<T, Poisson>) return rng.poisson(c.lambda);
                        else return rng.uniform(c.a, c.b);
                    },
                    ind->components[static_cast<std::size_t>(i)]);
            }
        }
        return out;
    }
    const auto &jn = std::get<JointNormal>(dist.dist);
    const Eigen::MatrixXd L = psd_cholesky(jn.covariance);
    Eigen::VectorXd zvec(r);
    for (long k = 0; k < count; ++k) {
        for (int i = 0; i < r; ++i) zvec[i] = rng.standard_normal();
        out.row(k) = (jn.mean + L * zvec).transpose();
    }
    return out;
}

XiMonomialMeans xi_monomial_means(const Eigen::MatrixXd &samples, const std::vector<MultiIndex> &betas) {
    if (samples.rows() < 1) throw std::invalid_argument("xi_monomial_means: no samples");
    XiMonomialMeans out;
    out.provenance = XiMonomialMeans::Provenance::Sampled;
    out.sample_count = samples.rows();
    std::vector<double> vals(static_cast<std::size_t>(samples.rows()));
    for (const auto &beta : betas) {
        if (beta.size() != samples.cols()) throw std::invalid_argument("xi_monomial_means: beta length mismatch");
        if (beta.is_zero()) {
            out.means[beta.exps()] = 1.0;
            continue;
        }
        for (long k = 0; k < samples.rows(); ++k) {
            double v = 1.0;
            for (int i = 0; i < beta.size(); ++i)
                for (int e = 0; e < beta[i]; ++e) v *= samples(k, i);
            vals[static_cast<std::size_t>(k)] = v;
        }
        std::sort(vals.begin(), vals.end());
        double acc = 0.0;
        for (double v : vals) acc += v;
        out.means[beta.exps()] = acc / static_cast<double>(samples.rows());
    }
    return out;
}

XiMonomialMeans fixed_means(const std::map<std::vector<int>, double> &means) {
    XiMonomialMeans out;
    out.means = means;
    out.provenance = XiMonomialMeans::Provenance::Fixed;
    return out;
}

SparsePoly sample_average_poly(const StochasticPoly &F, const XiMonomialMeans &means) {
    F.validate();
    SparsePoly f(F.n);
    for (const auto &[beta, poly] : F.terms) f += means.at(beta) * poly;
    return f;
}

} // namespace psaa
