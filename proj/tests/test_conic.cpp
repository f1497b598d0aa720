#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "psaa/conic_program.hpp"

using namespace psaa::conic;

namespace {

// Small builder for hand-written instances.
struct Builder {
    ConicProgram prog;
    int row = 0;

    explicit Builder(int nvars) {
        prog.num_vars = nvars;
        prog.c = Eigen::VectorXd::Zero(nvars);
    }
    void objective(int var, double coef) { prog.c[var] = coef; }
    // Starts a block; rows are then filled with entry()/rhs().
    int block(ConeKind kind, int size) {
        prog.cones.push_back({kind, size});
        const int first = row;
        row += ConeBlock{kind, size}.rows();
        prog.b.conservativeResize(row);
        prog.b.tail(row - first).setZero();
        return first;
    }
    void entry(int r, int var, double v) { prog.a.push_back({r, var, v}); }
    void rhs(int r, double v) { prog.b[r] = v; }
};

struct Expected {
    std::string name;
    ConicProgram prog;
    SolveStatus status;
    double value = 0.0; // checked only for Optimal
};

// s = b - Ax must lie in the cone. A row "x_i >= l" is s = x_i - l, i.e.
// A entry -1, b = -l.
std::vector<Expected> status_library() {
    std::vector<Expected> lib;

    { // 1: min x s.t. x >= 1
        Builder b(1);
        b.objective(0, 1.0);
        const int r = b.block(ConeKind::Nonneg, 1);
        b.entry(r, 0, -1.0);
        b.rhs(r, -1.0);
        lib.push_back({"lp_bounded", b.prog, SolveStatus::Optimal, 1.0});
    }
    { // 2: x >= 1 and -x >= 0 -> infeasible
        Builder b(1);
        b.objective(0, 1.0);
        const int r = b.block(ConeKind::Nonneg, 2);
        b.entry(r, 0, -1.0);
        b.rhs(r, -1.0);
        b.entry(r + 1, 0, 1.0);
        b.rhs(r + 1, 0.0);
        lib.push_back({"lp_infeasible", b.prog, SolveStatus::PrimalInfeasible});
    }
    { // 3: min -x s.t. x >= 0 -> unbounded
        Builder b(1);
        b.objective(0, -1.0);
        const int r = b.block(ConeKind::Nonneg, 1);
        b.entry(r, 0, -1.0);
        lib.push_back({"lp_unbounded", b.prog, SolveStatus::DualInfeasible});
    }
    { // 4: min t s.t. t >= ||(3,4)||
        Builder b(1);
        b.objective(0, 1.0);
        const int r = b.block(ConeKind::SecondOrder, 3);
        b.entry(r, 0, -1.0);
        b.rhs(r + 1, 3.0);
        b.rhs(r + 2, 4.0);
        lib.push_back({"soc_norm", b.prog, SolveStatus::Optimal, 5.0});
    }
    { // 5: ||x|| <= -1 -> infeasible
        Builder b(1);
        b.objective(0, 1.0);
        const int r = b.block(ConeKind::SecondOrder, 2);
        b.rhs(r, -1.0);
        b.entry(r + 1, 0, -1.0);
        lib.push_back({"soc_infeasible", b.prog, SolveStatus::PrimalInfeasible});
    }
    { // 6: min -x1 s.t. |x1| <= x2 (x2 free) -> unbounded
        Builder b(2);
        b.objective(0, -1.0);
        const int r = b.block(ConeKind::SecondOrder, 2);
        b.entry(r, 1, -1.0);
        b.entry(r + 1, 0, -1.0);
        lib.push_back({"soc_unbounded", b.prog, SolveStatus::DualInfeasible});
    }
    { // 7: min y2 s.t. [[1, y1], [y1, y2]] psd
        Builder b(2);
        b.objective(1, 1.0);
        const int r = b.block(ConeKind::Psd, 2);
        b.rhs(r, 1.0);
        b.entry(r + 1, 0, -std::sqrt(2.0));
        b.entry(r + 2, 1, -1.0);
        lib.push_back({"sdp_schur", b.prog, SolveStatus::Optimal, 0.0});
    }
    { // 8: max y s.t. [[1, y], [y, 1]] psd -> min -y = -1
        Builder b(1);
        b.objective(0, -1.0);
        const int r = b.block(ConeKind::Psd, 2);
        b.rhs(r, 1.0);
        b.entry(r + 1, 0, -std::sqrt(2.0));
        b.rhs(r + 2, 1.0);
        lib.push_back({"sdp_correlation", b.prog, SolveStatus::Optimal, -1.0});
    }
    { // 9: [[-1, y], [y, -1]] psd -> infeasible
        Builder b(1);
        b.objective(0, 1.0);
        const int r = b.block(ConeKind::Psd, 2);
        b.rhs(r, -1.0);
        b.entry(r + 1, 0, -std::sqrt(2.0));
        b.rhs(r + 2, -1.0);
        lib.push_back({"sdp_infeasible", b.prog, SolveStatus::PrimalInfeasible});
    }
    { // 10: min -y s.t. [[1+y, 0], [0, 1]] psd -> unbounded above in y
        Builder b(1);
        b.objective(0, -1.0);
        const int r = b.block(ConeKind::Psd, 2);
        b.entry(r, 0, -1.0);
        b.rhs(r, 1.0);
        b.rhs(r + 2, 1.0);
        lib.push_back({"sdp_unbounded", b.prog, SolveStatus::DualInfeasible});
    }
    { // 11: min x s.t. x = 3, x >= 0
        Builder b(1);
        b.objective(0, 1.0);
        const int re = b.block(ConeKind::Zero, 1);
        b.entry(re, 0, 1.0);
        b.rhs(re, 3.0);
        const int r = b.block(ConeKind::Nonneg, 1);
        b.entry(r, 0, -1.0);
        lib.push_back({"eq_feasible", b.prog, SolveStatus::Optimal, 3.0});
    }
    { // 12: x = 1, x = 2 -> infeasible equalities
        Builder b(1);
        b.objective(0, 1.0);
        const int re = b.block(ConeKind::Zero, 2);
        b.entry(re, 0, 1.0);
        b.rhs(re, 1.0);
        b.entry(re + 1, 0, 1.0);
        b.rhs(re + 1, 2.0);
        const int r = b.block(ConeKind::Nonneg, 1);
        b.entry(r, 0, -1.0);
        lib.push_back({"eq_contradiction", b.prog, SolveStatus::PrimalInfeasible});
    }
    { // 13: min x1 + x2 s.t. x1 >= 1, (x2, x1) soc -> x1 = 1, x2 >= 1
        Builder b(2);
        b.objective(0, 1.0);
        b.objective(1, 1.0);
        const int r = b.block(ConeKind::Nonneg, 1);
        b.entry(r, 0, -1.0);
        b.rhs(r, -1.0);
        const int q = b.block(ConeKind::SecondOrder, 2);
        b.entry(q, 1, -1.0);
        b.entry(q + 1, 0, -1.0);
        lib.push_back({"mixed_lp_soc", b.prog, SolveStatus::Optimal, 2.0});
    }
    { // 14: min t + y2 s.t. t >= ||(1,1)||, [[1, y1],[y1, y2]] psd
        Builder b(3);
        b.objective(0, 1.0);
        b.objective(2, 1.0);
        const int q = b.block(ConeKind::SecondOrder, 3);
        b.entry(q, 0, -1.0);
        b.rhs(q + 1, 1.0);
        b.rhs(q + 2, 1.0);
        const int r = b.block(ConeKind::Psd, 2);
        b.rhs(r, 1.0);
        b.entry(r + 1, 1, -std::sqrt(2.0));
        b.entry(r + 2, 2, -1.0);
        lib.push_back({"mixed_soc_psd", b.prog, SolveStatus::Optimal, std::sqrt(2.0)});
    }
    { // 15: degenerate LP with a face of optima: min x1 + x2, x1 + x2 >= 1, x >= 0
        Builder b(2);
        b.objective(0, 1.0);
        b.objective(1, 1.0);
        const int r = b.block(ConeKind::Nonneg, 3);
        b.entry(r, 0, -1.0);
        b.entry(r, 1, -1.0);
        b.rhs(r, -1.0);
        b.entry(r + 1, 0, -1.0);
        b.entry(r + 2, 1, -1.0);
        lib.push_back({"lp_degenerate", b.prog, SolveStatus::Optimal, 1.0});
    }
    { // 16: univariate moment mini-problem: min y2 - 2 y1 + 1, M_1[y] psd, y0 = 1
        Builder b(3); // y0, y1, y2
        b.objective(1, -2.0);
        b.objective(2, 1.0);
        const int re = b.block(ConeKind::Zero, 1);
        b.entry(re, 0, 1.0);
        b.rhs(re, 1.0);
        const int r = b.block(ConeKind::Psd, 2);
        b.entry(r, 0, -1.0);
        b.entry(r + 1, 1, -std::sqrt(2.0));
        b.entry(r + 2, 2, -1.0);
        lib.push_back({"moment_mini", b.prog, SolveStatus::Optimal, -1.0});
    }
    { // 17: x >= 0 and x <= -1 via nonneg rows
        Builder b(1);
        b.objective(0, 1.0);
        const int r = b.block(ConeKind::Nonneg, 2);
        b.entry(r, 0, -1.0);
        b.entry(r + 1, 0, 1.0);
        b.rhs(r + 1, -1.0);
        lib.push_back({"box_empty", b.prog, SolveStatus::PrimalInfeasible});
    }
    { // 18: min -(y1 + y2) s.t. [[y1, y3],[y3, y2]] psd, y3 = 1 -> ray (1,1,0)
        Builder b(3);
        b.objective(0, -1.0);
        b.objective(1, -1.0);
        const int re = b.block(ConeKind::Zero, 1);
        b.entry(re, 2, 1.0);
        b.rhs(re, 1.0);
        const int r = b.block(ConeKind::Psd, 2);
        b.entry(r, 0, -1.0);
        b.entry(r + 1, 2, -std::sqrt(2.0));
        b.entry(r + 2, 1, -1.0);
        lib.push_back({"sdp_trace_unbounded", b.prog, SolveStatus::DualInfeasible});
    }
    { // 19: zero objective over x >= 0
        Builder b(1);
        const int r = b.block(ConeKind::Nonneg, 1);
        b.entry(r, 0, -1.0);
        lib.push_back({"zero_objective", b.prog, SolveStatus::Optimal, 0.0});
    }
    { // 20: x0 = -1 pinned, (x0, x1) soc -> infeasible
        Builder b(2);
        b.objective(1, 1.0);
        const int re = b.block(ConeKind::Zero, 1);
        b.entry(re, 0, 1.0);
        b.rhs(re, -1.0);
        const int q = b.block(ConeKind::SecondOrder, 2);
        b.entry(q, 0, -1.0);
        b.entry(q + 1, 1, -1.0);
        lib.push_back({"soc_pinned_infeasible", b.prog, SolveStatus::PrimalInfeasible});
    }
    return lib;
}

} // namespace

TEST_CASE("svec round trip and inner product") {
    Eigen::MatrixXd m(3, 3);
    m << 1, 2, 3, 2, 5, 6, 3, 6, 9;
    const Eigen::VectorXd v = mat_to_svec(m);
    REQUIRE(v.size() == 6);
    CHECK((svec_to_mat(v, 3) - m).lpNorm<Eigen::Infinity>() == 0.0);
    Eigen::MatrixXd w(3, 3);
    w << 2, 1, 0, 1, 4, 2, 0, 2, 7;
    CHECK(mat_to_svec(w).dot(v) == doctest::Approx((m * w).trace()));
}

TEST_CASE("status soundness on the 20-instance library") {
    for (const auto &inst : status_library()) {
        CAPTURE(inst.name);
        const ConicSolution sol = solve(inst.prog);
        CHECK(sol.status == inst.status);
        if (inst.status == SolveStatus::Optimal && sol.status == SolveStatus::Optimal) {
            CHECK(sol.primal_obj == doctest::Approx(inst.value).epsilon(1e-6));
        }
    }
}

TEST_CASE("soc norm example solves to 1e-7") {
    auto lib = status_library();
    const ConicSolution sol = solve(lib[3].prog);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(std::abs(sol.primal_obj - 5.0) <= 1e-7);
    const ResidualReport rep = certify_solution(lib[3].prog, sol);
    CHECK(rep.pass);
    CHECK(rep.primal_residual <= 1e-7);
    CHECK(rep.dual_residual <= 1e-7);
}

TEST_CASE("certify_solution flags a corrupted solution") {
    auto lib = status_library();
    ConicSolution sol = solve(lib[3].prog);
    REQUIRE(sol.status == SolveStatus::Optimal);
    sol.x.array() += 1e-3;
    sol.s.array() += 1e-3;
    const ResidualReport rep = certify_solution(lib[3].prog, sol);
    CHECK_FALSE(rep.pass);
}

TEST_CASE("weak duality on optimal solves") {
    for (const auto &inst : status_library()) {
        if (inst.status != SolveStatus::Optimal) continue;
        const ConicSolution sol = solve(inst.prog);
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.primal_obj >= sol.dual_obj - 1e-7 * (1.0 + std::abs(sol.primal_obj)));
    }
}

TEST_CASE("determinism: identical runs produce identical iterates") {
    auto lib = status_library();
    for (const auto &name : {3, 6, 13, 15}) {
        const ConicSolution a = solve(lib[static_cast<std::size_t>(name)].prog);
        const ConicSolution b = solve(lib[static_cast<std::size_t>(name)].prog);
        CHECK(a.iterations == b.iterations);
        REQUIRE(a.x.size() == b.x.size());
        CHECK((a.x - b.x).lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + a.x.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("debug json dump is self-describing") {
    auto lib = status_library();
    const std::string js = to_debug_json(lib[0].prog);
    CHECK(js.find("\"num_vars\":1") != std::string::npos);
    CHECK(js.find("\"nonneg\"") != std::string::npos);
}

TEST_CASE("solver settings are honored") {
    auto lib = status_library();
    SolverSettings st;
    st.max_iter = 1;
    const ConicSolution sol = solve(lib[3].prog, st);
    CHECK(sol.status == SolveStatus::MaxIterations);
}

TEST_CASE("ill-posed unbounded instance is never misclassified") {
    // min -y1 s.t. [[1, y1],[y1, y2]] psd: the value is unbounded below but no
    // improving ray exists (y1 = t needs y2 = t^2), so no certificate can be
    // produced. Any outcome except a claimed solution is acceptable.
    Builder b(2);
    b.objective(0, -1.0);
    const int r = b.block(ConeKind::Psd, 2);
    b.rhs(r, 1.0);
    b.entry(r + 1, 0, -std::sqrt(2.0));
    b.entry(r + 2, 1, -1.0);
    const ConicSolution sol = solve(b.prog);
    CHECK(sol.status != SolveStatus::Optimal);
    CHECK(sol.status != SolveStatus::PrimalInfeasible);
}
