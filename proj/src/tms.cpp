#include "psaa/tms.hpp"

#include <stdexcept>

namespace psaa {

Tms::Tms(int n, int degree) : n_(n), degree_(degree) {
    if (n < 1 || degree < 0) throw std::invalid_argument("Tms: bad dimensions");
    values_.assign(static_cast<std::size_t>(basis_size(n, degree)), 0.0);
}

Tms::Tms(int n, int degree, std::vector<double> values) : n_(n), degree_(degree), values_(std::move(values)) {
    if (static_cast<std::int64_t>(values_.size()) != basis_size(n, degree))
        throw std::invalid_argument("Tms: value vector has wrong length");
}

double Tms::at(const MultiIndex &alpha) const {
    if (alpha.size() != n_ || alpha.degree() > degree_) throw std::out_of_range("Tms::at: index outside truncation");
    return values_[static_cast<std::size_t>(grlex_rank(alpha))];
}

void Tms::set(const MultiIndex &alpha, double v) {
    if (alpha.size() != n_ || alpha.degree() > degree_) throw std::out_of_range("Tms::set: index outside truncation");
    values_[static_cast<std::size_t>(grlex_rank(alpha))] = v;
}

double riesz_apply(const SparsePoly &f, const Tms &y) {
    if (f.vars() != y.vars()) throw std::invalid_argument("riesz_apply: variable count mismatch");
    if (f.degree() > y.degree()) throw std::invalid_argument("riesz_apply: polynomial degree exceeds tms degree");
    double acc = 0.0;
    for (const auto &[alpha, c] : f.terms()) acc += c * y[grlex_rank(alpha)];
    return acc;
}

Tms tms_of_point(const std::vector<double> &u, int k) {
    const int n = static_cast<int>(u.size());
    Tms y(n, k);
    const auto basis = monomial_basis(n, k);
    for (std::size_t r = 0; r < basis.size(); ++r) {
        double v = 1.0;
        const MultiIndex &alpha = basis[r];
        for (int i = 0; i < n; ++i) {
            for (int e = 0; e < alpha[i]; ++e) v *= u[static_cast<std::size_t>(i)];
        }
        y.values()[r] = v;
    }
    return y;
}

int relaxation_degree(const SparsePoly &f, const std::vector<SparsePoly> &g) {
    int maxdeg = f.degree();
    for (const auto &gi : g) maxdeg = std::max(maxdeg, gi.degree());
    return (maxdeg + 1) / 2;
}

} // namespace psaa
