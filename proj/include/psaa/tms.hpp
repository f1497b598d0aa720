#ifndef PSAA_TMS_HPP
#define PSAA_TMS_HPP

#include <vector>

#include "psaa/sparse_poly.hpp"

namespace psaa {

/// Truncated multi-sequence: a vector y indexed by grlex rank over all
/// monomials of degree <= degree(). Entry 0 is the y_0 slot.
class Tms {
  public:
    Tms(int n, int degree);
    Tms(int n, int degree, std::vector<double> values);

    int vars() const { return n_; }
    int degree() const { return degree_; }
    const std::vector<double> &values() const { return values_; }
    std::vector<double> &values() { return values_; }

    double operator[](std::int64_t rank) const { return values_[static_cast<std::size_t>(rank)]; }
    double at(const MultiIndex &alpha) const;
    void set(const MultiIndex &alpha, double v);

  private:
    int n_;
    int degree_;
    std::vector<double> values_;
};

/// Riesz functional <f, y> = sum_alpha f_alpha y_alpha.
double riesz_apply(const SparsePoly &f, const Tms &y);

/// The tms [u]_k of the point evaluation measure: y_alpha = u^alpha.
Tms tms_of_point(const std::vector<double> &u, int k);

/// d = ceil(max(deg f, deg g_1, ..., deg g_m) / 2).
int relaxation_degree(const SparsePoly &f, const std::vector<SparsePoly> &g);

} // namespace psaa

#endif
