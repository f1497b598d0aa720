#ifndef PSAA_PSAA_DRIVER_HPP
#define PSAA_PSAA_DRIVER_HPP

#include <string>
#include <vector>

#include "psaa/conic_program.hpp"
#include "psaa/moment_matrix.hpp"
#include "psaa/stochastic.hpp"

namespace psaa {

/// The norm-perturbed moment relaxation:
///   min <f_N, y> + eps ||y||  s.t.  y in S(g)_{2d}, y_0 = 1.
/// Variables are y over all monomials of degree <= 2d, plus the norm epigraph
/// t when eps > 0. The norm covers the full tms including y_0.
struct RelaxationInstance {
    SparsePoly f_N{1};
    std::vector<SparsePoly> g;
    int d = 0;
    double eps = 0.0;
    int y_dim = 0;
    ConeSpec cones;
    conic::ConicProgram program;
    /// Per-variable substitution x_i = L_i * xt_i applied before building.
    /// The program is posed in xt, with the norm epigraph weighted by L^alpha
    /// so it still bounds ||y|| in the original coordinates.
    std::vector<double> var_scale;

    /// Maps a solved xt-moment vector back to original-coordinate moments.
    Tms unscale_tms(const Eigen::VectorXd &x) const;
};

RelaxationInstance build_moment_relaxation(const SparsePoly &f_N, const std::vector<SparsePoly> &g,
                                           double eps, std::vector<double> var_scale = {});

struct TightnessResult {
    bool tight = false;
    double rank_ratio = 1.0; // second largest / largest moment-matrix eigenvalue
};

/// rank M_d[y*] = 1 test via the eigenvalue ratio; tight iff ratio <= tau_rank.
TightnessResult tightness_check(const Tms &y_star, int d, double tau_rank = 1e-6);

struct ExtractionResult {
    std::vector<double> u;       // pi(y*), the degree-one slice (authoritative)
    double discrepancy = 0.0;    // distance to the leading-eigenvector reconstruction
};

ExtractionResult extract_candidate(const Tms &y_star);

struct PsaaOptions {
    double eps0 = 1e-2;
    int max_doublings = 40;
    double eps_cap = 1e6;
    double tau_rank = 1e-6;
    conic::SolverSettings solver;
};

struct PsaaReport {
    std::string status; // solved | unbounded | infeasible | max_eps_exceeded | solver_failure
    bool solved = false;
    conic::SolveStatus solver_status = conic::SolveStatus::NumericalFailure;
    double eps_initial = 0.0;
    double eps_used = 0.0;
    int doublings = 0;
    double relaxation_value = 0.0; // <f_N, y*>
    double perturbed_value = 0.0;  // <f_N, y*> + eps ||y*||
    std::vector<double> u;
    double fN_at_u = 0.0;
    bool tight = false;
    double rank_ratio = 1.0;
    double duality_gap = 0.0;
    double abs_diff = 0.0; // |<f_N, y*> - f_N(u)|
    double wall_time = 0.0;
    // diagnostics
    double extraction_discrepancy = 0.0;
    double y_norm = 0.0;
    int iterations = 0;
    int relaxation_order = 0;
    int rescale_rounds = 0;
    std::vector<double> var_scale;
    SparsePoly f_N{1};
    std::vector<double> y_star;
};

/// Algorithm: build f_N, solve the perturbed relaxation (doubling eps on any
/// non-optimal outcome unless eps0 = 0), then extract u = pi(y*) and run the
/// rank-one tightness test. With eps0 = 0 a single unperturbed solve is
/// attempted (the classical SAA baseline).
PsaaReport run_psaa(const StochasticPoly &F, const std::vector<SparsePoly> &g,
                    const XiMonomialMeans &means, const PsaaOptions &opts = {});

PsaaReport run_psaa_samples(const StochasticPoly &F, const std::vector<SparsePoly> &g,
                            const Eigen::MatrixXd &samples, const PsaaOptions &opts = {});

std::string report_to_json(const PsaaReport &rep);

} // namespace psaa

#endif
