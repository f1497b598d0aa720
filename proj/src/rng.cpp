#include "psaa/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace psaa {

namespace {

std::uint64_t splitmix64(std::uint64_t &x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto &s : state_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform01_open_low() { return 1.0 - uniform01(); }

double Rng::uniform(double a, double b) { return a + (b - a) * uniform01(); }

int Rng::bernoulli(double p) { return uniform01() < p ? 1 : 0; }

int Rng::geometric(double p, int support_start) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("geometric: p must lie in (0,1)");
    const double u = uniform01_open_low();
    return static_cast<int>(std::floor(std::log(u) / std::log1p(-p))) + support_start;
}

int Rng::poisson(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("poisson: lambda must be positive");
    const double limit = std::exp(-lambda);
    int k = 0;
    double prod = uniform01_open_low();
    while (prod > limit) {
        ++k;
        prod *= uniform01_open_low();
    }
    return k;
}

double Rng::standard_normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform01_open_low();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

} // namespace psaa
