#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace biphoton {

// Deterministic random layer. The mt19937_64 engine output sequence is fixed
// by the C++ standard, but the std::*_distribution transforms are not, so the
// transforms are written out here to keep simulation output bit-identical
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform in [0, 1) with 53-bit resolution
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

  // exponential waiting time for a Poisson process of the given rate
  double exponential(double rate) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -std::log(u) / rate;
  }

  // Box-Muller; the spare value is kept so consecutive draws stay cheap
  double normal(double mean, double sigma) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + sigma * spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return mean + sigma * r * std::cos(a);
  }

  std::uint64_t raw() { return eng_(); }

  // splitmix64 step; used to derive independent per-point seeds from
  // (master seed, point index) so scan points are order-independent
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace biphoton
