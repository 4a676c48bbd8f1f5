#pragma once

// Reproducible sampling of points and directions. Uniform variates are built
// directly from the 64-bit Mersenne twister output so that a fixed seed gives
// the same sequence on every standard library.

#include <cstdint>
#include <random>

#include "finsmet/tensor.hpp"

namespace finsmet {

struct DomainBox {
  Vec4d lo{-1.0, -1.0, -1.0, -1.0};
  Vec4d hi{1.0, 1.0, 1.0, 1.0};

  bool contains(const Point& x) const {
    for (std::size_t i = 0; i < kDim; ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Point point(const DomainBox& box) {
    Point x;
    for (std::size_t i = 0; i < kDim; ++i) x[i] = uniform(box.lo[i], box.hi[i]);
    return x;
  }

  /// Uniform on the Euclidean unit sphere of the chart components.
  TangentVector direction() {
    for (;;) {
      TangentVector v;
      double n2 = 0.0;
      for (std::size_t i = 0; i < kDim; ++i) {
        v[i] = uniform(-1.0, 1.0);
        n2 += v[i] * v[i];
      }
      if (n2 > 1e-4 && n2 <= 1.0) {
        const double inv = 1.0 / std::sqrt(n2);
        for (double& c : v.components) c *= inv;
        return v;
      }
    }
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace finsmet
