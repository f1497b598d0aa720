#ifndef PSAA_PROBLEM_FILE_HPP
#define PSAA_PROBLEM_FILE_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "psaa/stochastic.hpp"

namespace psaa {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string &msg) : std::runtime_error(msg) {}
};

struct Reference {
    double f_min = 0.0;
    std::vector<double> v_star;
};

/// On-disk description of one stochastic program: objective F(x, xi) term
/// list, constraint polynomials g_i(x) >= 0, the xi distribution, optional
/// named fixed-average presets, and an optional reference optimum.
struct ProblemFile {
    std::string name;
    int n = 0;
    int r = 0;
    StochasticPoly objective;
    std::vector<SparsePoly> constraints;
    DistributionSpec distribution;
    std::map<std::string, std::map<std::vector<int>, double>> fixed_average_presets;
    std::optional<Reference> reference;

    XiMonomialMeans preset_means(const std::string &label) const;
};

ProblemFile parse_problem(const std::string &path);
ProblemFile parse_problem_text(const std::string &json_text, const std::string &origin = "<memory>");
std::string emit_problem(const ProblemFile &pf);

/// "1,0" <-> xi exponent vector, the key format of fixed_averages maps.
std::string xi_key(const std::vector<int> &exps);
std::vector<int> parse_xi_key(const std::string &key, int r);

} // namespace psaa

#endif
