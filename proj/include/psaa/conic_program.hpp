#ifndef PSAA_CONIC_PROGRAM_HPP
#define PSAA_CONIC_PROGRAM_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace psaa::conic {

enum class ConeKind { Zero, Nonneg, SecondOrder, Psd };

struct ConeBlock {
    ConeKind kind;
    int size; // vector dimension; for Psd the matrix side

    int rows() const { return kind == ConeKind::Psd ? size * (size + 1) / 2 : size; }
};

struct Triplet {
    int row;
    int col;
    double value;
};

/// Standard form: min c'x  s.t.  A x + s = b,  s in K,
/// where K is the product of the listed cone blocks (in row order).
/// Psd blocks enter through scaled vectorization: s = svec(S) with
/// off-diagonal entries multiplied by sqrt(2), so vector inner products
/// equal trace inner products.
struct ConicProgram {
    int num_vars = 0;
    Eigen::VectorXd c;
    std::vector<Triplet> a;
    Eigen::VectorXd b;
    std::vector<ConeBlock> cones;

    int num_rows() const {
        int m = 0;
        for (const auto &blk : cones) m += blk.rows();
        return m;
    }
};

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIterations, NumericalFailure };

std::string status_name(SolveStatus s);

struct SolverSettings {
    double tol_gap = 1e-8;
    double tol_feas = 1e-8;
    int max_iter = 200;
    double step_fraction = 0.99;
};

struct ConicSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    Eigen::VectorXd x; // primal decision vector
    Eigen::VectorXd s; // primal cone slacks
    Eigen::VectorXd z; // dual multipliers (row order of the program)
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double gap = 0.0;
    int iterations = 0;
};

ConicSolution solve(const ConicProgram &prog, const SolverSettings &settings = {});

struct ResidualReport {
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double comp_gap = 0.0;
    std::vector<double> min_eig_s; // per proper cone block
    std::vector<double> min_eig_z;
    bool pass = false;
};

/// Independent recomputation of the optimality conditions; thresholds are
/// 10x the solver tolerances.
ResidualReport certify_solution(const ConicProgram &prog, const ConicSolution &sol,
                                const SolverSettings &settings = {});

/// Self-describing JSON dump (objective, triplet constraint matrix, cone
/// list) for cross-checking against external solvers.
std::string to_debug_json(const ConicProgram &prog);

// svec helpers (column-major upper triangle, sqrt(2)-scaled off-diagonals).
int svec_dim(int side);
Eigen::VectorXd mat_to_svec(const Eigen::MatrixXd &m);
Eigen::MatrixXd svec_to_mat(const Eigen::VectorXd &v, int side);

} // namespace psaa::conic

#endif
