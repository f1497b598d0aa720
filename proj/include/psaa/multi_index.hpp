#ifndef PSAA_MULTI_INDEX_HPP
#define PSAA_MULTI_INDEX_HPP

#include <cstdint>
#include <vector>

namespace psaa {

/// Exponent vector of a monomial x^alpha with its total degree cached.
class MultiIndex {
  public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exps);

    int size() const { return static_cast<int>(exps_.size()); }
    int degree() const { return degree_; }
    int operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }
    const std::vector<int> &exps() const { return exps_; }

    MultiIndex plus(const MultiIndex &other) const;

    bool operator==(const MultiIndex &other) const { return exps_ == other.exps_; }
    bool is_zero() const { return degree_ == 0; }

  private:
    std::vector<int> exps_;
    int degree_ = 0;
};

/// Graded lexicographic order with x1 ranked first: compares by total degree,
/// then lexicographically on exponents (larger first exponent comes earlier).
bool grlex_less(const MultiIndex &a, const MultiIndex &b);

struct GrlexLess {
    bool operator()(const MultiIndex &a, const MultiIndex &b) const { return grlex_less(a, b); }
};

std::int64_t binomial(int n, int k);

/// Number of monomials in n variables of degree <= k.
std::int64_t basis_size(int n, int k);

/// All alpha with |alpha| <= k in grlex order; begins 1, x1, ..., xn, x1^2, x1x2, ...
std::vector<MultiIndex> monomial_basis(int n, int k);

/// Position of alpha in monomial_basis(n, |alpha|) without materializing the basis.
std::int64_t grlex_rank(const MultiIndex &alpha);

/// Inverse of grlex_rank for ranks within monomial_basis(n, k).
MultiIndex grlex_unrank(int n, int k, std::int64_t rank);

} // namespace psaa

#endif
