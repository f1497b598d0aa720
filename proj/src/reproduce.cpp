#include "psaa/reproduce.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace psaa {

namespace {

using P = SparsePoly;

std::vector<P> make_vars(int n) {
    std::vector<P> x;
    x.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x.push_back(P::variable(n, i));
    return x;
}

MultiIndex mi(std::vector<int> e) { return MultiIndex(std::move(e)); }

// ---- Example 4.1: polyhedral K, degree-7 objective, uniform noise ----
ProblemFile make_ex41() {
    ProblemFile pf;
    pf.name = "ex4.1";
    pf.n = 4;
    pf.r = 2;
    auto x = make_vars(4);
    const P one = P::constant(4, 1.0);
    P G = (x[0] * x[0] - 2.0 * (x[1] * x[1])) * (x[0] * x[0] - 2.0 * (x[1] * x[1]));
    G += x[2] * (2.0 * (x[2] * x[2]) - 3.0 * (x[0] * x[1]) + x[3] * x[3]) *
         (x[3] * x[3] - 3.0 * (x[0] * x[1]));
    G -= x[3] * x[2].pow(3) * (2.0 * x[0].pow(3) - x[2].pow(3));
    pf.objective.n = 4;
    pf.objective.r = 2;
    pf.objective.terms.emplace_back(mi({0, 0}), G);
    pf.objective.terms.emplace_back(mi({1, 0}), x[2].pow(5));
    pf.objective.terms.emplace_back(mi({0, 1}), x[0].pow(6) * x[3]);
    pf.constraints = {x[0] - one, x[1] - 0.5 * one, x[2] - (1.0 / 3.0) * one, x[3] - 0.25 * one};
    pf.distribution.dist = IndependentComponents{{Uniform{0.0, 2.0}, Uniform{0.0, 2.0}}};
    pf.fixed_average_presets["exact"] = {{{1, 0}, 1.0}, {{0, 1}, 1.0}};
    pf.fixed_average_presets["caseI"] = {{{1, 0}, 1.01}, {{0, 1}, 1.01}};
    pf.fixed_average_presets["caseII"] = {{{1, 0}, 0.99}, {{0, 1}, 1.01}};
    pf.fixed_average_presets["caseIII"] = {{{1, 0}, 0.99}, {{0, 1}, 0.99}};
    pf.fixed_average_presets["caseIV"] = {{{1, 0}, 1.01}, {{0, 1}, 0.99}};
    pf.reference = Reference{8.4455e-07, {1.0031, 0.7093, 1.0031, 1.0622}};
    return pf;
}

// ---- Example 4.2: compact K with cubic bound, joint normal noise ----
ProblemFile make_ex42() {
    ProblemFile pf;
    pf.name = "ex4.2";
    pf.n = 4;
    pf.r = 2;
    auto x = make_vars(4);
    const P one = P::constant(4, 1.0);
    P G = x[0] * x[0] * (x[1] * x[1]) + x[1] * x[1] * (x[2] * x[2]);
    G += (one - x[1] * x[2]) * (one - x[1] * x[2]);
    G += (3.0 * one - x[0] * x[3]) * (3.0 * one - x[0] * x[3]);
    G += x[0] * x[1] * x[2] * x[3];
    pf.objective.n = 4;
    pf.objective.r = 2;
    pf.objective.terms.emplace_back(mi({0, 0}), G);
    pf.objective.terms.emplace_back(mi({1, 0}), x[0] * (x[1] * x[1]) * x[2]);
    pf.objective.terms.emplace_back(mi({0, 1}), x[1] * x[1] * (x[3] * x[3]));
    pf.constraints = {x[0] * x[2] + one - x[1] * x[1] - x[3] * x[3],
                      x[1] * x[2] - x[0] * x[3] + 2.0 * one,
                      8.0 * one - x[0].pow(3) - x[1].pow(3) - x[2].pow(3) - x[3].pow(3),
                      x[0],
                      x[1],
                      x[2],
                      x[3]};
    JointNormal jn;
    jn.mean = Eigen::Vector2d(-0.41, -2.50);
    jn.covariance = Eigen::Matrix2d::Identity();
    pf.distribution.dist = jn;
    pf.fixed_average_presets["exact"] = {{{1, 0}, -0.41}, {{0, 1}, -2.50}};
    pf.fixed_average_presets["caseI"] = {{{1, 0}, -0.42}, {{0, 1}, -2.51}};
    pf.fixed_average_presets["caseII"] = {{{1, 0}, -0.42}, {{0, 1}, -2.50}};
    pf.fixed_average_presets["caseIII"] = {{{1, 0}, -0.41}, {{0, 1}, -2.51}};
    pf.reference = Reference{1.0655, {1.5829, 0.6427, 0.9316, 1.4358}};
    return pf;
}

// ---- Example 4.3: bivariate degree-6, four-dimensional normal noise ----
ProblemFile make_ex43() {
    ProblemFile pf;
    pf.name = "ex4.3";
    pf.n = 2;
    pf.r = 4;
    auto x = make_vars(2);
    const P one = P::constant(2, 1.0);
    pf.objective.n = 2;
    pf.objective.r = 4;
    pf.objective.terms.emplace_back(mi({1, 0, 0, 0}), x[0].pow(4) * x[1].pow(2));
    pf.objective.terms.emplace_back(mi({0, 1, 0, 0}), x[0].pow(2) * x[1].pow(4));
    pf.objective.terms.emplace_back(mi({0, 0, 1, 0}), -1.0 * (x[0] * x[1].pow(3)));
    pf.objective.terms.emplace_back(mi({0, 0, 0, 1}), x[0] * x[1]);
    pf.constraints = {x[0], 2.0 * one - x[0], 4.0 * one - x[0] - x[1], 8.0 * one - x[0] * x[1]};
    JointNormal jn;
    jn.mean = Eigen::Vector4d(1.0, 1.0, 3.0, 1.0);
    jn.covariance.resize(4, 4);
    jn.covariance << 1.0, 0.1, 0.3, 0.2, 0.1, 1.0, 0.4, 0.3, 0.3, 0.4, 1.0, 0.2, 0.2, 0.3, 0.2, 1.0;
    pf.distribution.dist = jn;
    pf.fixed_average_presets["exact"] = {
        {{1, 0, 0, 0}, 1.0}, {{0, 1, 0, 0}, 1.0}, {{0, 0, 1, 0}, 3.0}, {{0, 0, 0, 1}, 1.0}};
    pf.fixed_average_presets["caseI"] = pf.fixed_average_presets["exact"];
    pf.fixed_average_presets["caseII"] = {
        {{1, 0, 0, 0}, 1.001}, {{0, 1, 0, 0}, 0.999}, {{0, 0, 1, 0}, 3.001}, {{0, 0, 0, 1}, 0.999}};
    pf.reference = Reference{-27.8444, {0.3442, 3.6558}};
    return pf;
}

// ---- Example 4.4: simplex K, Bernoulli and geometric noise ----
ProblemFile make_ex44() {
    ProblemFile pf;
    pf.name = "ex4.4";
    pf.n = 3;
    pf.r = 2;
    auto x = make_vars(3);
    const P one = P::constant(3, 1.0);
    P G = x[0].pow(4) + x[0] * x[1] * x[2] + x[2] * (one - x[0] * x[0] - x[1] * x[1]);
    pf.objective.n = 3;
    pf.objective.r = 2;
    pf.objective.terms.emplace_back(mi({0, 0}), G);
    pf.objective.terms.emplace_back(mi({1, 0}), 2.0 * x[1].pow(4) - 4.0 * (x[0].pow(2) * x[1].pow(2)));
    pf.objective.terms.emplace_back(mi({0, 1}), -1.0 * (x[0] * x[1]));
    pf.constraints = {x[0], x[1], x[2], one - x[0] - x[1] - x[2]};
    pf.distribution.dist = IndependentComponents{{Bernoulli{0.5}, Geometric{0.5, 1}}};
    pf.fixed_average_presets["exact"] = {{{1, 0}, 0.5}, {{0, 1}, 2.0}};
    pf.fixed_average_presets["caseI"] = {{{1, 0}, 0.501}, {{0, 1}, 2.0}};
    pf.fixed_average_presets["caseII"] = {{{1, 0}, 0.5}, {{0, 1}, 2.001}};
    pf.reference = Reference{-0.5, {0.5, 0.5, 0.0}};
    return pf;
}

// ---- Example 4.5: unconstrained, Poisson noise ----
ProblemFile make_ex45() {
    ProblemFile pf;
    pf.name = "ex4.5";
    pf.n = 4;
    pf.r = 1;
    auto x = make_vars(4);
    const P one = P::constant(4, 1.0);
    const P d34 = x[2] - x[3];
    const P s12 = x[0] + x[1];
    const P cross = d34 * d34 * (s12 * s12);
    P G = d34.pow(4) + s12.pow(4) + x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
    pf.objective.n = 4;
    pf.objective.r = 1;
    pf.objective.terms.emplace_back(mi({0}), G + 2.0 * cross);
    pf.objective.terms.emplace_back(mi({1}), one + 2.0 * (x[0] - x[3]) - 2.0 * cross);
    pf.objective.terms.emplace_back(mi({2}), -1.0 * (x[0] - x[3]));
    pf.constraints = {};
    pf.distribution.dist = IndependentComponents{{Poisson{2.0}}};
    pf.fixed_average_presets["exact"] = {{{1}, 2.0}, {{2}, 6.0}};
    pf.fixed_average_presets["caseI"] = {{{1}, 2.11}, {{2}, 6.43}};
    pf.fixed_average_presets["caseII"] = {{{1}, 1.96}, {{2}, 5.71}};
    pf.fixed_average_presets["caseIII"] = {{{1}, 2.01}, {{2}, 6.13}};
    pf.fixed_average_presets["caseIV"] = {{{1}, 2.02}, {{2}, 6.07}};
    pf.reference = Reference{0.0, {1.0, 0.0, 0.0, -1.0}};
    return pf;
}

// ---- Example 4.6: bivariate with cross-moment noise terms ----
ProblemFile make_ex46() {
    ProblemFile pf;
    pf.name = "ex4.6";
    pf.n = 2;
    pf.r = 3;
    auto x = make_vars(2);
    const P one = P::constant(2, 1.0);
    P G = x[0].pow(4) + x[1].pow(4) + x[0] * x[1] - 2.0 * (x[0] + x[1]) + one;
    const P sq = x[0].pow(2) * x[1].pow(2);
    pf.objective.n = 2;
    pf.objective.r = 3;
    pf.objective.terms.emplace_back(mi({0, 0, 0}), G);
    pf.objective.terms.emplace_back(mi({1, 0, 1}), x[0].pow(2) * x[1] - sq);
    pf.objective.terms.emplace_back(mi({0, 1, 1}), x[0] * x[1].pow(2) - sq);
    pf.constraints = {x[0] - one, x[1], 2.0 * one - x[0] - x[1]};
    JointNormal jn;
    jn.mean = Eigen::Vector3d(0.0, 0.0, 1.0);
    jn.covariance.resize(3, 3);
    jn.covariance << 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 3.0;
    pf.distribution.dist = jn;
    pf.fixed_average_presets["exact"] = {{{1, 0, 1}, 1.0}, {{0, 1, 1}, 1.0}};
    pf.fixed_average_presets["caseI"] = {{{1, 0, 1}, 0.98}, {{0, 1, 1}, 1.06}};
    pf.fixed_average_presets["caseII"] = {{{1, 0, 1}, 1.08}, {{0, 1, 1}, 0.96}};
    pf.fixed_average_presets["caseIII"] = {{{1, 0, 1}, 1.01}, {{0, 1, 1}, 1.02}};
    pf.fixed_average_presets["caseIV"] = {{{1, 0, 1}, 0.97}, {{0, 1, 1}, 0.96}};
    pf.reference = Reference{-0.25, {1.0, 0.7071}};
    return pf;
}

// ---- Example 4.7: trivariate with scalar uniform noise powers ----
ProblemFile make_ex47() {
    ProblemFile pf;
    pf.name = "ex4.7";
    pf.n = 3;
    pf.r = 1;
    auto x = make_vars(3);
    const P one = P::constant(3, 1.0);
    const P q = x[0] * x[1] * x[2] * (x[0] + x[1] + x[2]);
    const P rpoly = x[0] * x[1] + x[1] * x[2] + x[0] * x[2];
    pf.objective.n = 3;
    pf.objective.r = 1;
    pf.objective.terms.emplace_back(mi({1}), -1.0 * q - rpoly);
    pf.objective.terms.emplace_back(mi({2}), 3.0 * q);
    pf.objective.terms.emplace_back(mi({3}), -1.0 * q + rpoly);
    pf.constraints = {x[0] - one, x[1] - one, x[2] - one, 8.0 * one - x[0] * x[1] * x[2]};
    pf.distribution.dist = IndependentComponents{{Uniform{0.0, 2.0}}};
    pf.fixed_average_presets["exact"] = {{{1}, 1.0}, {{2}, 4.0 / 3.0}, {{3}, 2.0}};
    pf.fixed_average_presets["caseI"] = {{{1}, 0.99}, {{2}, 1.32}, {{3}, 1.97}};
    pf.fixed_average_presets["caseII"] = {{{1}, 1.03}, {{2}, 1.38}, {{3}, 2.09}};
    pf.fixed_average_presets["caseIII"] = {{{1}, 1.00}, {{2}, 1.33}, {{3}, 1.99}};
    pf.reference = Reference{6.0, {1.0, 1.0, 1.0}};
    return pf;
}

// Cell-list construction helpers.
struct Cells {
    std::vector<ExpectedCell> v;

    void flag(const std::string &c, int slot, Metric m, bool expect) {
        v.push_back({c, slot, m, CheckMode::FlagEq, 0.0, {}, 0.0, expect});
    }
    void qual_flag(const std::string &c, int slot, Metric m, bool expect) {
        v.push_back({c, slot, m, CheckMode::QualFlag, 0.0, {}, 0.0, expect});
    }
    void abs_tol(const std::string &c, int slot, Metric m, double expect, double tol) {
        v.push_back({c, slot, m, CheckMode::AbsTol, expect, {}, tol, false});
    }
    void upper(const std::string &c, int slot, Metric m, double recorded, double bound) {
        v.push_back({c, slot, m, CheckMode::UpperBound, recorded, {}, bound, false});
    }
    void band(const std::string &c, int slot, Metric m, double expect) {
        v.push_back({c, slot, m, CheckMode::Band, expect, {}, 0.0, false});
    }
    void info(const std::string &c, int slot, Metric m, double expect) {
        v.push_back({c, slot, m, CheckMode::Info, expect, {}, 0.0, false});
    }
    void uvec(const std::string &c, int slot, std::vector<double> expect, double tol) {
        v.push_back({c, slot, Metric::UVec, CheckMode::VecTol, 0.0, std::move(expect), tol, false});
    }
};

ExampleDef def_ex41() {
    ExampleDef def;
    def.id = "ex4.1";
    def.table = 1;
    def.problem = make_ex41();
    const std::vector<EpsSpec> sched = {{false, 0.0}, {false, 1e-4}, {false, 1e-3}, {false, 1e-2}, {false, 1e-1}};
    def.cases = {{"I", "caseI", sched}, {"II", "caseII", sched}, {"III", "caseIII", sched}, {"IV", "caseIV", sched}};
    Cells c;
    const std::vector<double> abs1 = {1.29e-06, 6.41e-07, 2.38e-07, 1.30e-07, 4.75e-08};
    const std::vector<double> val1 = {2.05e-02, 2.05e-02, 2.07e-02, 3.41e-02, 3.33e-01};
    const std::vector<double> abs2 = {9.15e-07, 6.41e-07, 2.06e-07, 1.27e-07, 1.53e-08};
    const std::vector<double> val2 = {4.84e-04, 4.86e-04, 6.91e-04, 1.38e-02, 3.13e-01};
    for (int s = 0; s < 5; ++s) {
        c.flag("I", s, Metric::Solvable, true);
        c.flag("II", s, Metric::Solvable, true);
        if (s == 0) {
            c.band("I", s, Metric::AbsDiff, abs1[0]);
            c.band("II", s, Metric::AbsDiff, abs2[0]);
        } else {
            c.upper("I", s, Metric::AbsDiff, abs1[static_cast<std::size_t>(s)], 1e-5);
            c.upper("II", s, Metric::AbsDiff, abs2[static_cast<std::size_t>(s)], 1e-5);
        }
        c.band("I", s, Metric::ValueDiff, val1[static_cast<std::size_t>(s)]);
        c.band("II", s, Metric::ValueDiff, val2[static_cast<std::size_t>(s)]);
    }
    const std::vector<double> abs3 = {0.0, 1.13e+03, 7.50e-08, 1.25e-07, 8.22e-09};
    const std::vector<double> val3 = {0.0, 7.14e+05, 3.85e-02, 7.00e-03, 2.94e-01};
    const std::vector<double> abs4 = {0.0, 1.35e+03, 1.89e-07, 1.26e-07, 1.54e-08};
    const std::vector<double> val4 = {0.0, 6.52e+05, 4.73e-04, 1.32e-02, 3.14e-01};
    for (const auto &[label, absv, valv] :
         {std::tuple{std::string("III"), abs3, val3}, std::tuple{std::string("IV"), abs4, val4}}) {
        c.flag(label, 0, Metric::Solvable, false);
        for (int s = 2; s < 5; ++s) c.flag(label, s, Metric::Solvable, true);
        // The eps = 1e-4 row is a near-unbounded regime whose digits are
        // solver-dependent: reproduced qualitatively (solvable, not tight).
        c.qual_flag(label, 1, Metric::Solvable, true);
        c.info(label, 1, Metric::Tight, 0);
        c.info(label, 1, Metric::AbsDiff, absv[1]);
        c.info(label, 1, Metric::ValueDiff, valv[1]);
        for (int s = 2; s < 5; ++s) {
            c.upper(label, s, Metric::AbsDiff, absv[static_cast<std::size_t>(s)], 1e-5);
            c.band(label, s, Metric::ValueDiff, valv[static_cast<std::size_t>(s)]);
        }
    }
    def.cells = c.v;
    return def;
}

ExampleDef def_ex42() {
    ExampleDef def;
    def.id = "ex4.2";
    def.table = 2;
    def.problem = make_ex42();
    const std::vector<EpsSpec> sched = {{false, 0.0}, {false, 1e-4}, {false, 1e-3}, {false, 1e-2}};
    def.cases = {{"I", "caseI", sched}, {"II", "caseII", sched}, {"III", "caseIII", sched}};
    Cells c;
    const std::vector<std::vector<double>> absv = {{1.81e+05, 1.29e-08, 5.28e-09, 9.53e-09},
                                                   {1.87e+05, 1.29e-08, 5.61e-09, 9.64e-09},
                                                   {5.58e-02, 1.29e-08, 5.61e-09, 9.70e-09}};
    const std::vector<std::vector<double>> valv = {{1.81e+05, 1.48e-02, 1.48e-02, 1.47e-02},
                                                   {1.87e+05, 6.13e-03, 6.12e-03, 6.12e-03},
                                                   {1.40e-02, 8.56e-03, 8.56e-03, 8.55e-03}};
    const std::vector<std::string> labels = {"I", "II", "III"};
    for (std::size_t k = 0; k < labels.size(); ++k) {
        for (int s = 0; s < 4; ++s) c.flag(labels[k], s, Metric::Solvable, true);
        c.band(labels[k], 0, Metric::AbsDiff, absv[k][0]);
        c.band(labels[k], 0, Metric::ValueDiff, valv[k][0]);
        for (int s = 1; s < 4; ++s) {
            c.upper(labels[k], s, Metric::AbsDiff, absv[k][static_cast<std::size_t>(s)], 1e-6);
            c.abs_tol(labels[k], s, Metric::ValueDiff, valv[k][static_cast<std::size_t>(s)], 2e-3);
        }
    }
    def.cells = c.v;
    return def;
}

ExampleDef def_ex43() {
    ExampleDef def;
    def.id = "ex4.3";
    def.table = 3;
    def.problem = make_ex43();
    const std::vector<EpsSpec> sched = {{false, 0.0}, {false, 1e-4}, {false, 1e-3}};
    def.cases = {{"I", "caseI", sched}, {"II", "caseII", sched}};
    Cells c;
    // The eps = 0 relaxation sits exactly at the solvability threshold
    // (eps* is numerically zero): the printed row is a boundary artifact,
    // recorded qualitatively.
    c.qual_flag("I", 0, Metric::Solvable, true);
    c.qual_flag("II", 0, Metric::Solvable, true);
    for (int s = 1; s < 3; ++s) {
        c.flag("I", s, Metric::Solvable, true);
        c.flag("II", s, Metric::Solvable, true);
    }
    c.info("I", 0, Metric::AbsDiff, 1.86e+03);
    c.info("I", 0, Metric::ValueDiff, 3.44e+01);
    c.upper("I", 1, Metric::AbsDiff, 4.18e-06, 1e-4);
    c.abs_tol("I", 1, Metric::ValueDiff, 2.09e-04, 1e-3);
    c.upper("I", 2, Metric::AbsDiff, 3.55e-06, 1e-4);
    c.abs_tol("I", 2, Metric::ValueDiff, 2.30e-02, 2e-3);
    // Case II is a random draw in the source table; this preset stands in for
    // one such draw, so its digits are checked only qualitatively.
    c.info("II", 0, Metric::AbsDiff, 1.85e+03);
    c.info("II", 0, Metric::ValueDiff, 3.44e+01);
    c.band("II", 1, Metric::AbsDiff, 4.17e-06);
    c.band("II", 1, Metric::ValueDiff, 1.29e-02);
    c.band("II", 2, Metric::AbsDiff, 3.56e-06);
    c.band("II", 2, Metric::ValueDiff, 9.87e-03);
    def.cells = c.v;
    return def;
}

ExampleDef def_ex44() {
    ExampleDef def;
    def.id = "ex4.4";
    def.table = 4;
    def.problem = make_ex44();
    def.has_epsstar = true;
    def.cases = {{"I", "caseI", {{false, 0.0}, {false, 0.0012}, {false, 0.004}, {false, 0.008}}},
                 {"II", "caseII", {{false, 0.0}, {false, 1e-4}, {false, 1e-3}, {false, 1e-2}}}};
    Cells c;
    c.flag("I", 0, Metric::Solvable, false);
    for (int s = 1; s < 4; ++s) c.flag("I", s, Metric::Solvable, true);
    c.band("I", 1, Metric::AbsDiff, 5.31e-03);
    c.band("I", 2, Metric::AbsDiff, 3.36e-04);
    c.band("I", 3, Metric::AbsDiff, 1.09e-04);
    c.abs_tol("I", 1, Metric::ValueDiff, 5.44e-03, 2e-3);
    c.abs_tol("I", 2, Metric::ValueDiff, 4.61e-04, 2e-3);
    c.abs_tol("I", 3, Metric::ValueDiff, 2.34e-04, 2e-3);
    c.abs_tol("I", -1, Metric::EpsStar, 0.001155, 1e-4);
    const std::vector<double> abs2 = {5.03e-09, 1.84e-09, 1.61e-09, 1.86e-09};
    for (int s = 0; s < 4; ++s) {
        c.flag("II", s, Metric::Solvable, true);
        c.upper("II", s, Metric::AbsDiff, abs2[static_cast<std::size_t>(s)], 1e-6);
        c.abs_tol("II", s, Metric::ValueDiff, 2.50e-04, 1e-4);
        c.uvec("II", s, {0.5, 0.5, 0.0}, 1e-2);
    }
    c.upper("II", -1, Metric::EpsStar, 7.5875e-09, 1e-6);
    def.cells = c.v;
    return def;
}

ExampleDef def_ex45() {
    ExampleDef def;
    def.id = "ex4.5";
    def.table = 5;
    def.problem = make_ex45();
    def.has_epsstar = true;
    def.cases = {{"I", "caseI", {}},
                 {"II", "caseII", {}},
                 {"III", "caseIII", {{false, 0.0}, {true, 0.0}, {false, 0.1}}},
                 {"IV", "caseIV", {{false, 0.0}, {true, 0.0}, {false, 0.2}}}};
    Cells c;
    c.abs_tol("I", -1, Metric::EpsStar, 0.807543, 2e-3);
    c.upper("II", -1, Metric::EpsStar, 3.3618e-10, 1e-6);
    c.abs_tol("III", -1, Metric::EpsStar, 0.073413, 1e-3);
    c.abs_tol("IV", -1, Metric::EpsStar, 0.146826, 1e-3);

    c.flag("III", 0, Metric::Solvable, false);
    c.flag("III", 1, Metric::Solvable, true);
    c.flag("III", 2, Metric::Solvable, true);
    c.uvec("III", 1, {1.0216, 0.0035, 0.0035, -1.0216}, 2e-2);
    c.uvec("III", 2, {0.9102, 0.0071, 0.0071, -0.9102}, 2e-2);
    c.band("III", 1, Metric::DistToVStar, 3.09e-02);
    c.abs_tol("III", 2, Metric::DistToVStar, 1.28e-01, 2e-2);
    c.band("III", 1, Metric::AbsDiff, 5.30e+01);
    c.band("III", 2, Metric::AbsDiff, 2.02e-01);
    c.band("III", 1, Metric::ValueDiff, 5.39e+01);
    c.band("III", 2, Metric::ValueDiff, 3.90e-01);

    c.flag("IV", 0, Metric::Solvable, false);
    c.flag("IV", 1, Metric::Solvable, true);
    c.flag("IV", 2, Metric::Solvable, true);
    c.uvec("IV", 1, {0.9591, 0.0059, 0.0059, -0.9591}, 2e-2);
    c.uvec("IV", 2, {0.8070, 0.0085, 0.0085, -0.8070}, 2e-2);
    c.band("IV", 1, Metric::DistToVStar, 5.86e-02);
    c.abs_tol("IV", 2, Metric::DistToVStar, 2.73e-01, 2e-2);
    c.band("IV", 1, Metric::AbsDiff, 6.47e+01);
    c.band("IV", 2, Metric::AbsDiff, 2.28e-01);
    c.band("IV", 1, Metric::ValueDiff, 6.49e+01);
    c.band("IV", 2, Metric::ValueDiff, 2.96e-01);
    def.cells = c.v;
    return def;
}

ExampleDef def_ex46() {
    ExampleDef def;
    def.id = "ex4.6";
    def.table = 6;
    def.problem = make_ex46();
    def.has_epsstar = true;
    def.cases = {{"I", "caseI", {}},
                 {"II", "caseII", {{false, 0.0}, {true, 0.0}, {false, 0.05}}},
                 {"III", "caseIII", {{false, 0.0}, {true, 0.0}, {false, 0.05}}},
                 {"IV", "caseIV", {}}};
    Cells c;
    c.abs_tol("I", -1, Metric::EpsStar, 0.023094, 1e-3);
    c.abs_tol("II", -1, Metric::EpsStar, 0.023094, 1e-3);
    c.abs_tol("III", -1, Metric::EpsStar, 0.017321, 1e-3);
    c.upper("IV", -1, Metric::EpsStar, 1.1076e-09, 1e-6);

    for (const std::string label : {"II", "III"}) {
        c.flag(label, 0, Metric::Solvable, false);
        c.flag(label, 1, Metric::Solvable, true);
        c.flag(label, 2, Metric::Solvable, true);
    }
    // The eps = eps* column sits at the solvability edge: the y* there is
    // hugely non-tight (the table's own abs column is 1e+02), so its digits
    // are qualitative.
    c.uvec("II", 1, {1.0000, 0.7059}, 1e-1);
    c.band("II", 1, Metric::AbsDiff, 1.13e+02);
    c.band("II", 1, Metric::ValueDiff, 1.13e+02);
    c.band("II", 1, Metric::DistToVStar, 1.20e-03);
    c.uvec("II", 2, {1.0000, 0.6886}, 2e-2);
    c.band("II", 2, Metric::AbsDiff, 1.36e-02);
    c.abs_tol("II", 2, Metric::ValueDiff, 4.21e-03, 2e-3);
    c.band("II", 2, Metric::DistToVStar, 1.85e-02);

    c.uvec("III", 1, {1.0000, 0.7010}, 1e-1);
    c.band("III", 1, Metric::AbsDiff, 5.65e+00);
    c.band("III", 1, Metric::ValueDiff, 5.65e+00);
    c.band("III", 1, Metric::DistToVStar, 6.08e-03);
    c.uvec("III", 2, {1.0000, 0.6813}, 2e-2);
    c.band("III", 2, Metric::AbsDiff, 6.25e-03);
    c.abs_tol("III", 2, Metric::ValueDiff, 2.80e-03, 2e-3);
    c.band("III", 2, Metric::DistToVStar, 2.58e-02);
    def.cells = c.v;
    return def;
}

ExampleDef def_ex47() {
    ExampleDef def;
    def.id = "ex4.7";
    def.table = 7;
    def.problem = make_ex47();
    def.has_epsstar = true;
    const std::vector<EpsSpec> sched = {{false, 0.0}, {true, 0.0}};
    def.cases = {{"I", "caseI", sched}, {"II", "caseII", sched}, {"III", "caseIII", sched}};
    Cells c;
    c.abs_tol("I", -1, Metric::EpsStar, 0.508637, 2e-3);
    c.abs_tol("II", -1, Metric::EpsStar, 0.518810, 2e-3);
    c.abs_tol("III", -1, Metric::EpsStar, 0.508637, 2e-3);
    const std::vector<double> vals = {2.00e-02, 1.00e-02, 1.00e-02};
    const std::vector<std::string> labels = {"I", "II", "III"};
    for (std::size_t k = 0; k < labels.size(); ++k) {
        // eps = 0: the d = 2 relaxation is unbounded below (eps* > 0 proves
        // its dual empty), so the source row's "solvable" is a partially
        // converged artifact; recorded qualitatively, never gating.
        c.qual_flag(labels[k], 0, Metric::Solvable, true);
        c.info(labels[k], 0, Metric::ValueDiff, 2.07e+01);
        c.info(labels[k], 0, Metric::AbsDiff, 7.08e+01);
        c.info(labels[k], 0, Metric::DistToVStar, 1.67e+00);
        // eps = eps*: the infimum is not attained at the threshold, so the
        // objective cells depend on the margin above eps*; the extracted
        // point is the stable quantity.
        c.flag(labels[k], 1, Metric::Solvable, true);
        c.uvec(labels[k], 1, {1.0, 1.0, 1.0}, 1e-3);
        c.info(labels[k], 1, Metric::ValueDiff, vals[k]);
        c.info(labels[k], 1, Metric::AbsDiff, 1.07e-06);
        c.upper(labels[k], 1, Metric::DistToVStar, 2.97e-08, 2e-3);
    }
    def.cells = c.v;
    return def;
}

std::vector<ExampleDef> build_all() {
    return {def_ex41(), def_ex42(), def_ex43(), def_ex44(), def_ex45(), def_ex46(), def_ex47()};
}

} // namespace

const std::vector<ExampleDef> &builtin_examples() {
    static const std::vector<ExampleDef> defs = build_all();
    return defs;
}

const ExampleDef &builtin_example(const std::string &id) {
    for (const auto &def : builtin_examples())
        if (def.id == id) return def;
    throw std::invalid_argument("unknown example id '" + id + "' (expected ex4.1 .. ex4.7)");
}

ProblemFile builtin_problem(const std::string &id) { return builtin_example(id).problem; }

namespace {

double metric_value(const ExpectedCell &cell, const PsaaReport &rep, const ProblemFile &pf,
                    std::vector<double> *vec) {
    switch (cell.metric) {
    case Metric::AbsDiff:
        return rep.abs_diff;
    case Metric::ValueDiff:
        return pf.reference ? std::abs(rep.relaxation_value - pf.reference->f_min) : 0.0;
    case Metric::DistToVStar: {
        if (!pf.reference) return 0.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < rep.u.size(); ++i) {
            const double d = rep.u[i] - pf.reference->v_star[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    }
    case Metric::UVec:
        *vec = rep.u;
        return 0.0;
    case Metric::WallTime:
        return rep.wall_time;
    default:
        return 0.0;
    }
}

bool evaluate(CellResult &res) {
    const auto &cell = res.cell;
    switch (cell.mode) {
    case CheckMode::FlagEq:
    case CheckMode::QualFlag:
        return res.got_flag == cell.flag;
    case CheckMode::AbsTol:
        return std::abs(res.got - cell.expected) <= cell.tol;
    case CheckMode::UpperBound:
        return res.got <= cell.tol;
    case CheckMode::VecTol: {
        if (res.got_vec.size() != cell.expected_vec.size()) return false;
        double worst = 0.0;
        for (std::size_t i = 0; i < res.got_vec.size(); ++i)
            worst = std::max(worst, std::abs(res.got_vec[i] - cell.expected_vec[i]));
        return worst <= cell.tol;
    }
    case CheckMode::Band:
        return res.got <= std::max(100.0 * cell.expected, 1e-6);
    case CheckMode::Info:
        return true;
    }
    return false;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4e", v);
    return buf;
}

} // namespace

ExampleRun run_example(const ExampleDef &def, const ReproduceOptions &opts) {
    ExampleRun run;
    run.id = def.id;
    std::ostringstream table;
    table << "== " << def.id << " (Table " << def.table << ") ==\n";

    for (const auto &cs : def.cases) {
        CaseRun crun;
        crun.label = cs.label;
        const XiMonomialMeans means = def.problem.preset_means(cs.preset);
        const SparsePoly f_N = sample_average_poly(def.problem.objective, means);
        const int d = relaxation_degree(f_N, def.problem.constraints);

        bool needs_epsstar = def.has_epsstar;
        for (const auto &es : cs.eps_schedule) needs_epsstar = needs_epsstar || es.is_epsstar;
        if (needs_epsstar) {
            const EpsStarResult es = solve_epsstar(f_N, def.problem.constraints, d, opts.solver);
            crun.eps_star_available = es.status == conic::SolveStatus::Optimal;
            crun.eps_star = es.eps_star;
        }

        std::vector<double> eps_values;
        for (const auto &es : cs.eps_schedule) {
            const double eps =
                es.is_epsstar ? crun.eps_star * (1.0 + opts.epsstar_margin) : es.value;
            eps_values.push_back(eps);
            PsaaOptions popts;
            popts.eps0 = eps;
            popts.max_doublings = 0; // table cells are single fixed-eps solves
            popts.tau_rank = opts.tau_rank;
            popts.solver = opts.solver;
            crun.reports.push_back(run_psaa(def.problem.objective, def.problem.constraints, means, popts));
        }

        // Render this case in the source table's row layout.
        table << "case " << cs.label;
        if (crun.eps_star_available) table << "  (eps* = " << fmt(crun.eps_star) << ")";
        table << "\n";
        if (!cs.eps_schedule.empty()) {
            table << "  eps:";
            for (std::size_t s = 0; s < cs.eps_schedule.size(); ++s)
                table << "  " << (cs.eps_schedule[s].is_epsstar ? "eps*" : fmt(eps_values[s]));
            table << "\n  solvable?:";
            for (const auto &rep : crun.reports) table << "  " << (rep.solved ? "yes" : "no");
            table << "\n  time(sec.):";
            for (const auto &rep : crun.reports) table << "  " << fmt(rep.wall_time);
            table << "\n  |<fN,y*>-fN(u)|:";
            for (const auto &rep : crun.reports) table << "  " << (rep.solved ? fmt(rep.abs_diff) : "n.a.");
            table << "\n  |<fN,y*>-f_min|:";
            for (const auto &rep : crun.reports)
                table << "  "
                      << (rep.solved && def.problem.reference
                              ? fmt(std::abs(rep.relaxation_value - def.problem.reference->f_min))
                              : "n.a.");
            if (def.problem.reference) {
                table << "\n  ||u-v*||:";
                for (const auto &rep : crun.reports) {
                    if (!rep.solved) {
                        table << "  n.a.";
                        continue;
                    }
                    double acc = 0.0;
                    for (std::size_t i = 0; i < rep.u.size(); ++i) {
                        const double dd = rep.u[i] - def.problem.reference->v_star[i];
                        acc += dd * dd;
                    }
                    table << "  " << fmt(std::sqrt(acc));
                }
            }
            table << "\n  u:";
            for (const auto &rep : crun.reports) {
                if (!rep.solved) {
                    table << "  n.a.";
                    continue;
                }
                table << "  (";
                for (std::size_t i = 0; i < rep.u.size(); ++i) table << (i ? "," : "") << fmt(rep.u[i]);
                table << ")";
            }
            table << "\n";
        }
        run.cases.push_back(std::move(crun));
    }

    for (const auto &cell : def.cells) {
        CellResult res;
        res.cell = cell;
        const CaseRun *crun = nullptr;
        for (const auto &cr : run.cases)
            if (cr.label == cell.case_label) crun = &cr;
        if (crun == nullptr) continue;
        if (cell.eps_slot < 0) {
            res.evaluated = crun->eps_star_available;
            res.got = crun->eps_star;
            res.pass = res.evaluated && evaluate(res);
        } else {
            const PsaaReport &rep = crun->reports[static_cast<std::size_t>(cell.eps_slot)];
            if (cell.metric == Metric::Solvable) {
                res.evaluated = true;
                res.got_flag = rep.solved;
                res.pass = evaluate(res);
            } else if (cell.metric == Metric::Tight) {
                res.evaluated = rep.solved;
                res.got_flag = rep.tight;
                res.pass = cell.mode == CheckMode::Info || (res.evaluated && evaluate(res));
            } else if (!rep.solved) {
                res.evaluated = false;
                res.pass = cell.mode == CheckMode::Info;
            } else {
                res.evaluated = true;
                res.got = metric_value(cell, rep, def.problem, &res.got_vec);
                res.pass = evaluate(res);
            }
        }
        if (!res.pass) {
            if (cell.mode == CheckMode::Band || cell.mode == CheckMode::QualFlag)
                ++run.qualitative_failures;
            else if (cell.mode != CheckMode::Info)
                ++run.must_failures;
        }
        run.cells.push_back(std::move(res));
    }

    run.table_text = table.str();
    return run;
}

std::string metric_name(Metric m) {
    switch (m) {
    case Metric::Solvable:
        return "solvable";
    case Metric::Tight:
        return "tight";
    case Metric::AbsDiff:
        return "abs_diff";
    case Metric::ValueDiff:
        return "value_diff";
    case Metric::DistToVStar:
        return "dist_to_vstar";
    case Metric::UVec:
        return "u";
    case Metric::EpsStar:
        return "eps_star";
    case Metric::WallTime:
        return "wall_time";
    }
    return "?";
}

std::string mode_name(CheckMode m) {
    switch (m) {
    case CheckMode::FlagEq:
        return "must_flag";
    case CheckMode::AbsTol:
        return "must_abs";
    case CheckMode::UpperBound:
        return "must_upper";
    case CheckMode::VecTol:
        return "must_vec";
    case CheckMode::Band:
        return "qualitative";
    case CheckMode::QualFlag:
        return "qualitative_flag";
    case CheckMode::Info:
        return "info";
    }
    return "?";
}

std::string scorecard_json(const std::vector<ExampleRun> &runs) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &run : runs) {
        for (const auto &res : run.cells) {
            nlohmann::json j;
            j["example"] = run.id;
            j["case"] = res.cell.case_label;
            j["eps_slot"] = res.cell.eps_slot;
            j["metric"] = metric_name(res.cell.metric);
            j["mode"] = mode_name(res.cell.mode);
            if (res.cell.mode == CheckMode::FlagEq) {
                j["expected"] = res.cell.flag;
                j["got"] = res.got_flag;
            } else if (res.cell.mode == CheckMode::VecTol) {
                j["expected"] = res.cell.expected_vec;
                j["got"] = res.got_vec;
                j["tol"] = res.cell.tol;
            } else {
                j["expected"] = res.cell.expected;
                j["got"] = res.evaluated ? nlohmann::json(res.got) : nlohmann::json(nullptr);
                if (res.cell.mode == CheckMode::AbsTol || res.cell.mode == CheckMode::UpperBound)
                    j["tol"] = res.cell.tol;
            }
            j["pass"] = res.pass;
            out.push_back(j);
        }
    }
    return out.dump(2);
}

} // namespace psaa
