#ifndef BMFL_RNG_HPP
#define BMFL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "bmfl/common.hpp"

namespace bmfl {

// Deterministic standard normals: hand-rolled Box-Muller on top of the
// mt19937_64 stream, so results do not depend on the standard library's
// normal_distribution implementation.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = ((rng_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = (rng_() >> 11) * 0x1.0p-53;        // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  VecC vector(Eigen::Index n) {
    VecC v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cxd((*this)(), (*this)());
    return v;
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace bmfl

#endif
