#include "psaa/sparse_poly.hpp"

#include <cmath>
#include <stdexcept>

namespace psaa {

SparsePoly::SparsePoly(int n, const std::vector<std::pair<std::vector<int>, double>> &terms) : n_(n) {
    for (const auto &[exps, c] : terms) add_term(MultiIndex(exps), c);
}

SparsePoly SparsePoly::constant(int n, double c) {
    SparsePoly f(n);
    f.add_term(MultiIndex(std::vector<int>(static_cast<std::size_t>(n), 0)), c);
    return f;
}

SparsePoly SparsePoly::monomial(int n, std::vector<int> exps, double c) {
    SparsePoly f(n);
    f.add_term(MultiIndex(std::move(exps)), c);
    return f;
}

SparsePoly SparsePoly::variable(int n, int i) {
    if (i < 0 || i >= n) throw std::invalid_argument("SparsePoly::variable: index out of range");
    std::vector<int> exps(static_cast<std::size_t>(n), 0);
    exps[static_cast<std::size_t>(i)] = 1;
    return monomial(n, std::move(exps));
}

int SparsePoly::degree() const {
    // Keys are grlex-sorted, so the last one has the maximal degree.
    return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double SparsePoly::coefficient(const MultiIndex &alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? 0.0 : it->second;
}

void SparsePoly::add_term(const MultiIndex &alpha, double c) {
    if (alpha.size() != n_) throw std::invalid_argument("SparsePoly::add_term: wrong exponent length");
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(alpha, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

SparsePoly &SparsePoly::operator+=(const SparsePoly &g) {
    if (g.n_ != n_) throw std::invalid_argument("SparsePoly: variable count mismatch");
    for (const auto &[alpha, c] : g.terms_) add_term(alpha, c);
    return *this;
}

SparsePoly &SparsePoly::operator-=(const SparsePoly &g) {
    if (g.n_ != n_) throw std::invalid_argument("SparsePoly: variable count mismatch");
    for (const auto &[alpha, c] : g.terms_) add_term(alpha, -c);
    return *this;
}

SparsePoly &SparsePoly::operator*=(double c) {
    if (c == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto &[alpha, coef] : terms_) coef *= c;
    return *this;
}

SparsePoly operator*(const SparsePoly &f, const SparsePoly &g) {
    if (f.n_ != g.n_) throw std::invalid_argument("SparsePoly: variable count mismatch");
    SparsePoly h(f.n_);
    for (const auto &[a, ca] : f.terms_) {
        for (const auto &[b, cb] : g.terms_) {
            h.add_term(a.plus(b), ca * cb);
        }
    }
    return h;
}

SparsePoly SparsePoly::pow(int k) const {
    if (k < 0) throw std::invalid_argument("SparsePoly::pow: negative exponent");
    SparsePoly result = constant(n_, 1.0);
    for (int i = 0; i < k; ++i) result = result * (*this);
    return result;
}

SparsePoly SparsePoly::differentiate(int var) const {
    if (var < 0 || var >= n_) throw std::invalid_argument("SparsePoly::differentiate: index out of range");
    SparsePoly d(n_);
    for (const auto &[alpha, c] : terms_) {
        const int e = alpha[var];
        if (e == 0) continue;
        std::vector<int> exps = alpha.exps();
        exps[static_cast<std::size_t>(var)] = e - 1;
        d.add_term(MultiIndex(std::move(exps)), c * e);
    }
    return d;
}

double SparsePoly::max_abs_coefficient() const {
    double m = 0.0;
    for (const auto &[alpha, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

double SparsePoly::coefficient_norm() const {
    double s = 0.0;
    for (const auto &[alpha, c] : terms_) s += c * c;
    return std::sqrt(s);
}

double poly_eval(const SparsePoly &f, const std::vector<double> &u) {
    if (static_cast<int>(u.size()) != f.vars()) throw std::invalid_argument("poly_eval: dimension mismatch");
    double acc = 0.0;
    for (const auto &[alpha, c] : f.terms()) {
        double mono = 1.0;
        for (int i = 0; i < alpha.size(); ++i) {
            for (int e = 0; e < alpha[i]; ++e) mono *= u[static_cast<std::size_t>(i)];
        }
        acc += c * mono;
    }
    return acc;
}

} // namespace psaa
