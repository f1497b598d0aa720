#include "psaa/sos_dual.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace psaa {

using conic::ConeBlock;
using conic::ConeKind;
using conic::ConicProgram;

namespace {

// Appends the coefficient-matching rows and the PSD blocks shared by the SOS
// dual and the eps* program. Row r (r = 0..p_dim-1) encodes the coefficient
// of the grlex-rank-r monomial:
//   p_r + gamma*[r==0] + sum_blocks <A_r, G_b> = (f_N)_r.
void append_matching_and_grams(SosDualProgram &sd, const SparsePoly &f_N,
                               const std::vector<SparsePoly> &g, int n, int d, int row_offset) {
    auto &prog = sd.program;

    // Matching rows (Zero cone), one per monomial of degree <= 2d.
    prog.cones.push_back({ConeKind::Zero, sd.p_dim});
    for (int r = 0; r < sd.p_dim; ++r) prog.b[row_offset + r] = 0.0;
    for (const auto &[alpha, c] : f_N.terms())
        prog.b[row_offset + static_cast<int>(grlex_rank(alpha))] = c;
    prog.a.push_back({row_offset, sd.gamma_index, 1.0});
    for (int r = 0; r < sd.p_dim; ++r) prog.a.push_back({row_offset + r, sd.p_offset + r, 1.0});

    // Gram layouts reuse the localizing-matrix term lists in reverse: the
    // (i,j) entry of the layout for g_b lists exactly the monomials that
    // G_b(i,j) feeds in g_b * [x]' G_b [x].
    std::vector<MatrixLayout> layouts;
    layouts.push_back(moment_layout(n, d));
    for (const auto &gi : g) layouts.push_back(localizing_layout(gi, n, d));

    int var = sd.p_offset + sd.p_dim;
    int psd_row = row_offset + sd.p_dim;
    for (const auto &layout : layouts) {
        const int side = layout.side;
        sd.gram_offsets.push_back(var);
        sd.gram_sides.push_back(side);
        sd.gram_bases.push_back(layout.row_labels);
        for (int j = 0; j < side; ++j) {
            for (int i = 0; i <= j; ++i) {
                const int v = var + conic::svec_dim(j) + i; // svec slot of (i,j)
                const double scale = i == j ? 1.0 : std::numbers::sqrt2;
                for (const auto &term : layout.entries[layout.upper_index(i, j)])
                    prog.a.push_back({row_offset + static_cast<int>(term.y_rank), v, scale * term.coefficient});
            }
        }
        // G_b itself must be PSD: s = svec(G_b).
        const int rows = conic::svec_dim(side);
        prog.cones.push_back({ConeKind::Psd, side});
        for (int k = 0; k < rows; ++k) prog.a.push_back({psd_row + k, var + k, -1.0});
        var += rows;
        psd_row += rows;
    }
    prog.num_vars = var;
}

int total_gram_rows(const std::vector<SparsePoly> &g, int n, int d) {
    int rows = conic::svec_dim(static_cast<int>(basis_size(n, d)));
    for (const auto &gi : g) {
        const int t = d - (gi.degree() + 1) / 2;
        rows += conic::svec_dim(static_cast<int>(basis_size(n, t)));
    }
    return rows;
}

} // namespace

SosDualProgram build_sos_dual(const SparsePoly &f_N, const std::vector<SparsePoly> &g, int d, double eps) {
    if (eps < 0.0) throw std::invalid_argument("build_sos_dual: eps must be nonnegative");
    const int n = f_N.vars();
    SosDualProgram sd;
    sd.n = n;
    sd.d = d;
    sd.gamma_index = 0;
    sd.p_offset = 1;
    sd.p_dim = static_cast<int>(basis_size(n, 2 * d));

    auto &prog = sd.program;
    const int gram_rows = total_gram_rows(g, n, d);
    const int norm_rows = eps > 0.0 ? 1 + sd.p_dim : sd.p_dim;
    prog.b = Eigen::VectorXd::Zero(sd.p_dim + gram_rows + norm_rows);

    append_matching_and_grams(sd, f_N, g, n, d, 0);

    int row = sd.p_dim + gram_rows;
    if (eps > 0.0) {
        // ||vec(p)|| <= eps as a second-order block (eps, p).
        prog.cones.push_back({ConeKind::SecondOrder, 1 + sd.p_dim});
        prog.b[row] = eps;
        for (int k = 0; k < sd.p_dim; ++k) prog.a.push_back({row + 1 + k, sd.p_offset + k, -1.0});
    } else {
        // eps = 0 pins p to zero; a second-order block would have no interior.
        prog.cones.push_back({ConeKind::Zero, sd.p_dim});
        for (int k = 0; k < sd.p_dim; ++k) prog.a.push_back({row + k, sd.p_offset + k, 1.0});
    }

    prog.c = Eigen::VectorXd::Zero(prog.num_vars);
    prog.c[sd.gamma_index] = -1.0; // max gamma
    return sd;
}

GramCertificate SosDualProgram::extract_certificate(const conic::ConicSolution &sol) const {
    GramCertificate cert;
    cert.n = n;
    cert.d = d;
    cert.gamma = sol.x[gamma_index];
    cert.p = SparsePoly(n);
    const auto basis = monomial_basis(n, 2 * d);
    for (int r = 0; r < p_dim; ++r) cert.p.add_term(basis[static_cast<std::size_t>(r)], sol.x[p_offset + r]);
    for (std::size_t b = 0; b < gram_offsets.size(); ++b) {
        const int side = gram_sides[b];
        cert.grams.push_back(
            conic::svec_to_mat(sol.x.segment(gram_offsets[b], conic::svec_dim(side)), side));
    }
    cert.gram_bases = gram_bases;
    return cert;
}

SosDualResult solve_sos_dual(const SparsePoly &f_N, const std::vector<SparsePoly> &g, int d, double eps,
                             const conic::SolverSettings &settings) {
    const SosDualProgram sd = build_sos_dual(f_N, g, d, eps);
    const conic::ConicSolution sol = conic::solve(sd.program, settings);
    SosDualResult out;
    out.status = sol.status;
    out.iterations = sol.iterations;
    out.gap = sol.gap;
    if (sol.status == conic::SolveStatus::Optimal) {
        out.gamma = -sol.primal_obj;
        out.certificate = sd.extract_certificate(sol);
    }
    return out;
}

EpsStarResult solve_epsstar(const SparsePoly &f_N, const std::vector<SparsePoly> &g, int d,
                            const conic::SolverSettings &settings) {
    const int n = f_N.vars();
    SosDualProgram sd;
    sd.n = n;
    sd.d = d;
    // Variable order: t (norm epigraph), gamma, vec(p), svecs.
    sd.gamma_index = 1;
    sd.p_offset = 2;
    sd.p_dim = static_cast<int>(basis_size(n, 2 * d));

    auto &prog = sd.program;
    const int gram_rows = total_gram_rows(g, n, d);
    prog.b = Eigen::VectorXd::Zero(sd.p_dim + gram_rows + 1 + sd.p_dim);
    append_matching_and_grams(sd, f_N, g, n, d, 0);

    int row = sd.p_dim + gram_rows;
    prog.cones.push_back({ConeKind::SecondOrder, 1 + sd.p_dim});
    prog.a.push_back({row, 0, -1.0}); // s0 = t
    for (int k = 0; k < sd.p_dim; ++k) prog.a.push_back({row + 1 + k, sd.p_offset + k, -1.0});

    prog.c = Eigen::VectorXd::Zero(prog.num_vars);
    prog.c[0] = 1.0; // min t

    const conic::ConicSolution sol = conic::solve(prog, settings);
    EpsStarResult out;
    out.status = sol.status;
    out.iterations = sol.iterations;
    out.gap = sol.gap;
    if (sol.status == conic::SolveStatus::Optimal) {
        out.eps_star = std::max(0.0, sol.x[0]);
        out.certificate = sd.extract_certificate(sol);
    }
    return out;
}

MembershipReport verify_membership(const SparsePoly &f_N, const std::vector<SparsePoly> &g,
                                   const GramCertificate &cert) {
    MembershipReport rep;
    const int n = f_N.vars();
    // Rebuild sigma_0 + sum g_i sigma_i by direct polynomial arithmetic.
    SparsePoly total(n);
    for (std::size_t b = 0; b < cert.grams.size(); ++b) {
        const auto &basis = cert.gram_bases[b];
        const auto &G = cert.grams[b];
        SparsePoly sigma(n);
        for (std::size_t j = 0; j < basis.size(); ++j) {
            for (std::size_t i = 0; i <= j; ++i) {
                const double w = (i == j ? 1.0 : 2.0) * G(static_cast<int>(i), static_cast<int>(j));
                sigma.add_term(basis[i].plus(basis[j]), w);
            }
        }
        if (b == 0)
            total += sigma;
        else
            total += g[b - 1] * sigma;
    }
    SparsePoly residual = f_N - cert.p - SparsePoly::constant(n, cert.gamma) - total;
    rep.max_coefficient_residual = residual.max_abs_coefficient();
    for (const auto &G : cert.grams) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
        rep.gram_min_eigs.push_back(es.eigenvalues().minCoeff());
    }
    bool eigs_ok = true;
    for (double e : rep.gram_min_eigs) eigs_ok = eigs_ok && e >= -1e-7;
    rep.pass = rep.max_coefficient_residual <= 1e-6 * (1.0 + f_N.coefficient_norm()) && eigs_ok;
    return rep;
}

std::string certificate_to_json(const GramCertificate &cert) {
    nlohmann::json j;
    j["n"] = cert.n;
    j["d"] = cert.d;
    j["gamma"] = cert.gamma;
    j["p"] = nlohmann::json::array();
    for (const auto &[alpha, c] : cert.p.terms()) {
        j["p"].push_back({{"exps", alpha.exps()}, {"coef", c}});
    }
    j["grams"] = nlohmann::json::array();
    for (std::size_t b = 0; b < cert.grams.size(); ++b) {
        nlohmann::json jb;
        jb["basis"] = nlohmann::json::array();
        for (const auto &label : cert.gram_bases[b]) jb["basis"].push_back(label.exps());
        jb["matrix"] = nlohmann::json::array();
        const auto &G = cert.grams[b];
        for (int i = 0; i < G.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int jcol = 0; jcol < G.cols(); ++jcol) row.push_back(G(i, jcol));
            jb["matrix"].push_back(row);
        }
        j["grams"].push_back(jb);
    }
    return j.dump(2);
}

GramCertificate certificate_from_json(const std::string &text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    GramCertificate cert;
    cert.n = j.at("n").get<int>();
    cert.d = j.at("d").get<int>();
    cert.gamma = j.at("gamma").get<double>();
    cert.p = SparsePoly(cert.n);
    for (const auto &t : j.at("p"))
        cert.p.add_term(MultiIndex(t.at("exps").get<std::vector<int>>()), t.at("coef").get<double>());
    for (const auto &jb : j.at("grams")) {
        std::vector<MultiIndex> basis;
        for (const auto &e : jb.at("basis")) basis.push_back(MultiIndex(e.get<std::vector<int>>()));
        const int side = static_cast<int>(basis.size());
        Eigen::MatrixXd G(side, side);
        for (int i = 0; i < side; ++i)
            for (int c = 0; c < side; ++c) G(i, c) = jb.at("matrix")[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
        cert.gram_bases.push_back(std::move(basis));
        cert.grams.push_back(std::move(G));
    }
    return cert;
}

} // namespace psaa
