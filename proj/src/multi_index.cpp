#include "psaa/multi_index.hpp"

#include <numeric>
#include <stdexcept>

namespace psaa {

MultiIndex::MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) {
    for (int e : exps_) {
        if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    }
    degree_ = std::accumulate(exps_.begin(), exps_.end(), 0);
}

MultiIndex MultiIndex::plus(const MultiIndex &other) const {
    if (other.size() != size()) throw std::invalid_argument("MultiIndex::plus: dimension mismatch");
    std::vector<int> e(exps_);
    for (int i = 0; i < size(); ++i) e[static_cast<std::size_t>(i)] += other[i];
    return MultiIndex(std::move(e));
}

bool grlex_less(const MultiIndex &a, const MultiIndex &b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    // Same degree: the monomial with the lexicographically larger exponent
    // vector (x1 weighted highest) comes first.
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return false;
}

std::int64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return result;
}

std::int64_t basis_size(int n, int k) { return binomial(n + k, k); }

namespace {

void enumerate_level(int n, int degree, std::vector<int> &prefix, std::vector<MultiIndex> &out) {
    const int pos = static_cast<int>(prefix.size());
    if (pos == n - 1) {
        prefix.push_back(degree);
        out.emplace_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int e = degree; e >= 0; --e) {
        prefix.push_back(e);
        enumerate_level(n, degree - e, prefix, out);
        prefix.pop_back();
    }
}

// Rank of alpha[pos..] among monomials of the given degree in the remaining
// variables, under the descending-lex order used within a degree level.
std::int64_t rank_within_level(const MultiIndex &alpha, int pos, int degree) {
    const int n = alpha.size();
    if (pos >= n - 1) return 0;
    const int vars_left = n - pos - 1;
    std::int64_t r = 0;
    for (int t = degree; t > alpha[pos]; --t) {
        r += binomial(degree - t + vars_left - 1, vars_left - 1);
    }
    return r + rank_within_level(alpha, pos + 1, degree - alpha[pos]);
}

} // namespace

std::vector<MultiIndex> monomial_basis(int n, int k) {
    if (n < 1) throw std::invalid_argument("monomial_basis: n must be >= 1");
    if (k < 0) throw std::invalid_argument("monomial_basis: k must be >= 0");
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(basis_size(n, k)));
    std::vector<int> prefix;
    for (int d = 0; d <= k; ++d) enumerate_level(n, d, prefix, out);
    return out;
}

std::int64_t grlex_rank(const MultiIndex &alpha) {
    const int n = alpha.size();
    const int d = alpha.degree();
    // Monomials of degree < d, then the position within the degree level.
    std::int64_t below = d > 0 ? basis_size(n, d - 1) : 0;
    return below + rank_within_level(alpha, 0, d);
}

MultiIndex grlex_unrank(int n, int k, std::int64_t rank) {
    if (rank < 0 || rank >= basis_size(n, k)) throw std::out_of_range("grlex_unrank: rank out of range");
    int d = 0;
    while (basis_size(n, d) <= rank) ++d;
    std::int64_t within = rank - (d > 0 ? basis_size(n, d - 1) : 0);
    std::vector<int> exps(static_cast<std::size_t>(n), 0);
    int degree_left = d;
    for (int pos = 0; pos < n - 1; ++pos) {
        const int vars_left = n - pos - 1;
        for (int t = degree_left; t >= 0; --t) {
            const std::int64_t count = binomial(degree_left - t + vars_left - 1, vars_left - 1);
            if (within < count) {
                exps[static_cast<std::size_t>(pos)] = t;
                degree_left -= t;
                break;
            }
            within -= count;
        }
    }
    exps[static_cast<std::size_t>(n - 1)] = degree_left;
    return MultiIndex(std::move(exps));
}

} // namespace psaa
