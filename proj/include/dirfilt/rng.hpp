#ifndef DIRFILT_RNG_HPP
#define DIRFILT_RNG_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace dirfilt {

/// Seedable generator used for all synthetic sampling. The engine is
/// std::mt19937_64 (bit-portable by the standard); the distributions
/// are implemented here rather than taken from <random> so sequences
/// do not depend on the standard library's implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Index sampled proportionally to the (non-negative) weights.
  int categorical(std::span<const double> weights);

  /// Standard normal via the polar (Marsaglia) method.
  double normal();

  /// Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape);

  /// Dirichlet(alpha) via normalized gamma draws.
  std::vector<double> dirichlet(std::span<const double> alpha);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dirfilt

#endif  // DIRFILT_RNG_HPP
