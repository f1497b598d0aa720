#ifndef PSAA_RNG_HPP
#define PSAA_RNG_HPP

#include <cstdint>

namespace psaa {

/// Deterministic 64-bit generator: xoshiro256++ with splitmix64 seeding.
/// Identical seeds give identical streams on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform double in [0, 1): 53 mantissa bits of the next word.
    double uniform01();
    /// Uniform double in (0, 1], safe as a log argument.
    double uniform01_open_low();

    double uniform(double a, double b);
    int bernoulli(double p);
    /// Inversion sampler floor(ln U / ln(1-p)) + support_start.
    int geometric(double p, int support_start);
    /// Knuth product-of-uniforms sampler.
    int poisson(double lambda);
    /// Standard normal via Box-Muller (second variate cached).
    double standard_normal();

  private:
    std::uint64_t state_[4];
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

} // namespace psaa

#endif
