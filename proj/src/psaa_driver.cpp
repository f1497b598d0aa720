#include "psaa/psaa_driver.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace psaa {

using conic::ConeKind;
using conic::SolveStatus;

namespace {

SparsePoly substitute_scaled(const SparsePoly &f, const std::vector<double> &L) {
    SparsePoly out(f.vars());
    for (const auto &[alpha, coef] : f.terms()) {
        double scale = 1.0;
        for (int i = 0; i < alpha.size(); ++i)
            for (int e = 0; e < alpha[i]; ++e) scale *= L[static_cast<std::size_t>(i)];
        out.add_term(alpha, coef * scale);
    }
    return out;
}

double monomial_scale(const MultiIndex &alpha, const std::vector<double> &L) {
    double w = 1.0;
    for (int i = 0; i < alpha.size(); ++i)
        for (int e = 0; e < alpha[i]; ++e) w *= L[static_cast<std::size_t>(i)];
    return w;
}

// Appends the svec rows of one moment-type block: s = svec(B(y)) must be PSD.
void append_layout_block(conic::ConicProgram &prog, const MatrixLayout &layout, int row_offset) {
    prog.cones.push_back({ConeKind::Psd, layout.side});
    for (int j = 0; j < layout.side; ++j) {
        for (int i = 0; i <= j; ++i) {
            const int row = row_offset + conic::svec_dim(j) + i;
            const double scale = i == j ? 1.0 : std::numbers::sqrt2;
            for (const auto &term : layout.entries[layout.upper_index(i, j)])
                prog.a.push_back({row, static_cast<int>(term.y_rank), -scale * term.coefficient});
        }
    }
}

} // namespace

RelaxationInstance build_moment_relaxation(const SparsePoly &f_N, const std::vector<SparsePoly> &g,
                                           double eps, std::vector<double> var_scale) {
    if (eps < 0.0) throw std::invalid_argument("build_moment_relaxation: eps must be nonnegative");
    RelaxationInstance inst;
    inst.f_N = f_N;
    inst.g = g;
    inst.eps = eps;
    const int n = f_N.vars();
    if (var_scale.empty()) var_scale.assign(static_cast<std::size_t>(n), 1.0);
    if (static_cast<int>(var_scale.size()) != n)
        throw std::invalid_argument("build_moment_relaxation: var_scale length mismatch");
    inst.var_scale = var_scale;
    bool scaled = false;
    for (double L : var_scale) scaled = scaled || L != 1.0;
    const SparsePoly fs = scaled ? substitute_scaled(f_N, var_scale) : f_N;
    std::vector<SparsePoly> gs;
    if (scaled)
        for (const auto &gi : g) gs.push_back(substitute_scaled(gi, var_scale));
    const std::vector<SparsePoly> &gref = scaled ? gs : g;
    inst.d = relaxation_degree(fs, gref);
    inst.y_dim = static_cast<int>(basis_size(n, 2 * inst.d));
    inst.cones = cone_spec(gref, n, inst.d);

    auto &prog = inst.program;
    prog.num_vars = inst.y_dim + (eps > 0.0 ? 1 : 0);

    int rows = 1 + conic::svec_dim(inst.cones.moment.side);
    for (const auto &[gi, layout] : inst.cones.localizers) rows += conic::svec_dim(layout.side);
    if (eps > 0.0) rows += 1 + inst.y_dim;
    prog.b = Eigen::VectorXd::Zero(rows);

    // y_0 = 1 as a Zero-cone row.
    prog.cones.push_back({ConeKind::Zero, 1});
    prog.a.push_back({0, 0, 1.0});
    prog.b[0] = 1.0;

    int row = 1;
    append_layout_block(prog, inst.cones.moment, row);
    row += conic::svec_dim(inst.cones.moment.side);
    for (const auto &[gi, layout] : inst.cones.localizers) {
        append_layout_block(prog, layout, row);
        row += conic::svec_dim(layout.side);
    }

    if (eps > 0.0) {
        // Norm epigraph: (t, y) in a second-order block; the norm covers the
        // whole tms including y_0, mirroring eps ||[x]_{2d}||. Under variable
        // substitution the rows carry L^alpha so t still bounds the norm of
        // the original-coordinate moment vector.
        prog.cones.push_back({ConeKind::SecondOrder, 1 + inst.y_dim});
        prog.a.push_back({row, inst.y_dim, -1.0});
        const auto basis = monomial_basis(n, 2 * inst.d);
        for (int k = 0; k < inst.y_dim; ++k) {
            const double w = scaled ? monomial_scale(basis[static_cast<std::size_t>(k)], var_scale) : 1.0;
            prog.a.push_back({row + 1 + k, k, -w});
        }
    }

    prog.c = Eigen::VectorXd::Zero(prog.num_vars);
    for (const auto &[alpha, c] : fs.terms()) prog.c[static_cast<int>(grlex_rank(alpha))] = c;
    if (eps > 0.0) prog.c[inst.y_dim] = eps;
    return inst;
}

Tms RelaxationInstance::unscale_tms(const Eigen::VectorXd &x) const {
    const int n = f_N.vars();
    std::vector<double> vals(static_cast<std::size_t>(y_dim));
    bool scaled = false;
    for (double L : var_scale) scaled = scaled || L != 1.0;
    const auto basis = monomial_basis(n, 2 * d);
    for (int k = 0; k < y_dim; ++k) {
        const double w = scaled ? monomial_scale(basis[static_cast<std::size_t>(k)], var_scale) : 1.0;
        vals[static_cast<std::size_t>(k)] = w * x[k];
    }
    return Tms(n, 2 * d, std::move(vals));
}

TightnessResult tightness_check(const Tms &y_star, int d, double tau_rank) {
    const MatrixLayout layout = moment_layout(y_star.vars(), d);
    const Eigen::MatrixXd m = assemble(layout, y_star);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const auto &ev = es.eigenvalues(); // ascending
    TightnessResult res;
    const int k = static_cast<int>(ev.size());
    const double largest = ev[k - 1];
    if (largest <= 0.0) {
        res.rank_ratio = 1.0;
        res.tight = false;
        return res;
    }
    const double second = k >= 2 ? std::max(ev[k - 2], 0.0) : 0.0;
    res.rank_ratio = second / largest;
    res.tight = res.rank_ratio <= tau_rank;
    return res;
}

ExtractionResult extract_candidate(const Tms &y_star) {
    const int n = y_star.vars();
    ExtractionResult res;
    res.u.resize(static_cast<std::size_t>(n));
    // Ranks 1..n are exactly the degree-one monomials x1..xn.
    for (int i = 0; i < n; ++i) res.u[static_cast<std::size_t>(i)] = y_star[1 + i];

    // Diagnostic: compare against the scaled leading eigenvector of M_d[y*].
    const int d = y_star.degree() / 2;
    const MatrixLayout layout = moment_layout(n, d);
    const Eigen::MatrixXd m = assemble(layout, y_star);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const int k = static_cast<int>(m.rows());
    const double lmax = es.eigenvalues()[k - 1];
    const Eigen::VectorXd q = es.eigenvectors().col(k - 1);
    if (lmax > 0.0 && std::abs(q[0]) > 1e-12) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double recon = q[1 + i] / q[0];
            acc += (recon - res.u[static_cast<std::size_t>(i)]) * (recon - res.u[static_cast<std::size_t>(i)]);
        }
        res.discrepancy = std::sqrt(acc);
    } else {
        res.discrepancy = std::numeric_limits<double>::infinity();
    }
    return res;
}

PsaaReport run_psaa(const StochasticPoly &F, const std::vector<SparsePoly> &g,
                    const XiMonomialMeans &means, const PsaaOptions &opts) {
    const auto t_start = std::chrono::steady_clock::now();
    PsaaReport rep;
    rep.eps_initial = opts.eps0;
    if (opts.eps0 < 0.0) throw std::invalid_argument("run_psaa: eps0 must be nonnegative");

    const SparsePoly f_N = sample_average_poly(F, means);
    rep.f_N = f_N;

    double eps = opts.eps0;
    conic::ConicSolution sol;
    RelaxationInstance inst;
    const int n = f_N.vars();
    std::vector<double> scale_hint(static_cast<std::size_t>(n), 1.0);
    // High-degree moments of points outside the unit box overwhelm the
    // conic solve; when a solve stalls, re-pose it with the variables
    // substituted to the magnitude seen in the returned iterate.
    auto attempt = [&](double eps_value) {
        for (int round = 0;; ++round) {
            inst = build_moment_relaxation(f_N, g, eps_value, scale_hint);
            sol = conic::solve(inst.program, opts.solver);
            if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::PrimalInfeasible ||
                sol.status == SolveStatus::DualInfeasible || round >= 2)
                return;
            if (sol.x.size() < inst.y_dim || std::abs(sol.x[0] - 1.0) > 0.5) return;
            bool changed = false;
            std::vector<double> next(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const double est = std::abs(sol.x[1 + i]) * scale_hint[static_cast<std::size_t>(i)];
                next[static_cast<std::size_t>(i)] = std::min(std::max(1.0, est), 1e6);
                changed = changed || std::abs(next[static_cast<std::size_t>(i)] -
                                              scale_hint[static_cast<std::size_t>(i)]) >
                                         0.05 * scale_hint[static_cast<std::size_t>(i)];
            }
            if (!changed) return;
            scale_hint = next;
            ++rep.rescale_rounds;
        }
    };
    while (true) {
        attempt(eps);
        rep.relaxation_order = inst.d;
        rep.solver_status = sol.status;
        rep.eps_used = eps;
        if (sol.status == SolveStatus::Optimal) break;
        // No doubling for the classical SAA baseline or single fixed-eps runs.
        if (opts.eps0 == 0.0 || opts.max_doublings == 0) break;
        if (rep.doublings >= opts.max_doublings || eps > opts.eps_cap) {
            rep.status = "max_eps_exceeded";
            rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
            return rep;
        }
        eps *= 2.0;
        ++rep.doublings;
    }

    if (sol.status != SolveStatus::Optimal) {
        rep.status = sol.status == SolveStatus::DualInfeasible     ? "unbounded"
                     : sol.status == SolveStatus::PrimalInfeasible ? "infeasible"
                                                                   : "solver_failure";
        rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return rep;
    }

    rep.status = "solved";
    rep.solved = true;
    rep.iterations = sol.iterations;
    rep.duality_gap = sol.gap;

    const Tms y_star = inst.unscale_tms(sol.x);
    rep.y_star = y_star.values();
    rep.var_scale = inst.var_scale;
    rep.y_norm = std::sqrt(
        std::inner_product(rep.y_star.begin(), rep.y_star.end(), rep.y_star.begin(), 0.0));
    rep.relaxation_value = riesz_apply(f_N, y_star);
    rep.perturbed_value = rep.relaxation_value + eps * rep.y_norm;

    const ExtractionResult ex = extract_candidate(y_star);
    rep.u = ex.u;
    rep.extraction_discrepancy = ex.discrepancy;
    const TightnessResult tight = tightness_check(y_star, inst.d, opts.tau_rank);
    rep.tight = tight.tight;
    rep.rank_ratio = tight.rank_ratio;
    rep.fN_at_u = poly_eval(f_N, rep.u);
    rep.abs_diff = std::abs(rep.relaxation_value - rep.fN_at_u);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

PsaaReport run_psaa_samples(const StochasticPoly &F, const std::vector<SparsePoly> &g,
                            const Eigen::MatrixXd &samples, const PsaaOptions &opts) {
    return run_psaa(F, g, xi_monomial_means(samples, F.betas()), opts);
}

std::string report_to_json(const PsaaReport &rep) {
    nlohmann::json j;
    j["status"] = rep.status;
    j["solved"] = rep.solved;
    j["solver_status"] = conic::status_name(rep.solver_status);
    j["eps_initial"] = rep.eps_initial;
    j["eps_used"] = rep.eps_used;
    j["doublings"] = rep.doublings;
    j["relaxation_order"] = rep.relaxation_order;
    if (rep.solved) {
        j["relaxation_value"] = rep.relaxation_value;
        j["perturbed_value"] = rep.perturbed_value;
        j["u"] = rep.u;
        j["fN_at_u"] = rep.fN_at_u;
        j["tight"] = rep.tight;
        j["rank_ratio"] = rep.rank_ratio;
        j["duality_gap"] = rep.duality_gap;
        j["abs_diff"] = rep.abs_diff;
        j["extraction_discrepancy"] = rep.extraction_discrepancy;
        j["y_norm"] = rep.y_norm;
        j["iterations"] = rep.iterations;
    } else {
        j["relaxation_value"] = nullptr;
        j["u"] = nullptr;
    }
    j["wall_time"] = rep.wall_time;
    return j.dump(2);
}

} // namespace psaa
