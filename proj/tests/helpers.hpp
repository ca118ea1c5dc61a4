#pragma once

#include <complex>
#include <random>

#include "biquat/algebra.hpp"

namespace testutil {

using biquat::BiQuaternion;
using biquat::cplx;

inline double cdist(cplx a, cplx b) { return std::abs(a - b); }

inline double mat_dist(const BiQuaternion& a, const BiQuaternion& b) {
  return std::max(std::max(cdist(a.z11, b.z11), cdist(a.z12, b.z12)),
                  std::max(cdist(a.z21, b.z21), cdist(a.z22, b.z22)));
}

// Deterministic RNG for property tests.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed = 12345) : eng(seed) {}
  double uniform(double a = 0.0, double b = 1.0) {
    const double u = double(eng() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
  }
  cplx cunit() {
    const double t = uniform(0.0, 6.283185307179586);
    return {std::cos(t), std::sin(t)};
  }
  // Random biquaternion with complex components in a ball of radius r.
  BiQuaternion cball(double r) {
    return biquat::from_components(cplx(uniform(-r, r), uniform(-r, r)),
                                   cplx(uniform(-r, r), uniform(-r, r)),
                                   cplx(uniform(-r, r), uniform(-r, r)),
                                   cplx(uniform(-r, r), uniform(-r, r)));
  }
  // Random real quaternion with |X| <= r roughly.
  BiQuaternion rball(double r) {
    return biquat::from_real(uniform(-r, r), uniform(-r, r), uniform(-r, r),
                             uniform(-r, r));
  }
};

}  // namespace testutil
