#ifndef PSAA_SPARSE_POLY_HPP
#define PSAA_SPARSE_POLY_HPP

#include <map>
#include <vector>

#include "psaa/multi_index.hpp"

namespace psaa {

/// Sparse multivariate polynomial over x1..xn, keyed by exponent multi-index.
/// Coefficients that are exactly zero are never stored.
class SparsePoly {
  public:
    using TermMap = std::map<MultiIndex, double, GrlexLess>;

    explicit SparsePoly(int n = 1) : n_(n) {}
    SparsePoly(int n, const std::vector<std::pair<std::vector<int>, double>> &terms);

    static SparsePoly constant(int n, double c);
    static SparsePoly monomial(int n, std::vector<int> exps, double c = 1.0);
    /// The i-th coordinate polynomial x_{i+1}.
    static SparsePoly variable(int n, int i);

    int vars() const { return n_; }
    int degree() const;
    bool is_zero() const { return terms_.empty(); }
    const TermMap &terms() const { return terms_; }
    double coefficient(const MultiIndex &alpha) const;

    void add_term(const MultiIndex &alpha, double c);

    SparsePoly &operator+=(const SparsePoly &g);
    SparsePoly &operator-=(const SparsePoly &g);
    SparsePoly &operator*=(double c);

    friend SparsePoly operator+(SparsePoly f, const SparsePoly &g) { return f += g; }
    friend SparsePoly operator-(SparsePoly f, const SparsePoly &g) { return f -= g; }
    friend SparsePoly operator*(SparsePoly f, double c) { return f *= c; }
    friend SparsePoly operator*(double c, SparsePoly f) { return f *= c; }
    friend SparsePoly operator*(const SparsePoly &f, const SparsePoly &g);
    friend SparsePoly operator-(const SparsePoly &f) { return f * -1.0; }

    SparsePoly pow(int k) const;
    SparsePoly differentiate(int var) const;

    /// Largest absolute coefficient (0 for the zero polynomial).
    double max_abs_coefficient() const;
    /// Euclidean norm of the coefficient vector.
    double coefficient_norm() const;

  private:
    int n_;
    TermMap terms_;
};

/// Evaluates f at u, accumulating terms in grlex (degree-sorted) order.
double poly_eval(const SparsePoly &f, const std::vector<double> &u);

} // namespace psaa

#endif
