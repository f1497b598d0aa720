#ifndef PSAA_SOS_DUAL_HPP
#define PSAA_SOS_DUAL_HPP

#include <string>
#include <vector>

#include "psaa/conic_program.hpp"
#include "psaa/moment_matrix.hpp"

namespace psaa {

/// Witness that f_N - p - gamma lies in the truncated quadratic module:
/// f_N - p - gamma = [x]'G0[x] + sum_i g_i [x]'Gi[x].
struct GramCertificate {
    int n = 0;
    int d = 0;
    double gamma = 0.0;
    SparsePoly p{1};
    std::vector<Eigen::MatrixXd> grams;               // G0 first, then one per constraint
    std::vector<std::vector<MultiIndex>> gram_bases;  // row labels of each Gram
};

/// The SOS dual program: max gamma s.t. f_N - p - gamma in Q(g)_{2d},
/// ||vec(p)|| <= eps. Variable order: gamma, vec(p), svec of each Gram.
struct SosDualProgram {
    conic::ConicProgram program;
    int n = 0;
    int d = 0;
    int gamma_index = 0;
    int p_offset = 0;
    int p_dim = 0;
    std::vector<int> gram_offsets;
    std::vector<int> gram_sides;
    std::vector<std::vector<MultiIndex>> gram_bases;

    GramCertificate extract_certificate(const conic::ConicSolution &sol) const;
};

SosDualProgram build_sos_dual(const SparsePoly &f_N, const std::vector<SparsePoly> &g, int d, double eps);

struct SosDualResult {
    conic::SolveStatus status;
    double gamma = 0.0;
    GramCertificate certificate;
    int iterations = 0;
    double gap = 0.0;
};

SosDualResult solve_sos_dual(const SparsePoly &f_N, const std::vector<SparsePoly> &g, int d, double eps,
                             const conic::SolverSettings &settings = {});

/// The minimum-perturbation program: eps* = min ||vec(p)|| over (gamma, p,
/// Grams) subject to the same coefficient-matching constraints.
struct EpsStarResult {
    double eps_star = 0.0;
    GramCertificate certificate;
    conic::SolveStatus status;
    int iterations = 0;
    double gap = 0.0;
};

EpsStarResult solve_epsstar(const SparsePoly &f_N, const std::vector<SparsePoly> &g, int d,
                            const conic::SolverSettings &settings = {});

/// Independent check of the module-membership identity by direct polynomial
/// arithmetic (no shared code with the program builders).
struct MembershipReport {
    double max_coefficient_residual = 0.0;
    std::vector<double> gram_min_eigs;
    bool pass = false;
};

MembershipReport verify_membership(const SparsePoly &f_N, const std::vector<SparsePoly> &g,
                                   const GramCertificate &cert);

std::string certificate_to_json(const GramCertificate &cert);
GramCertificate certificate_from_json(const std::string &text);

} // namespace psaa

#endif
