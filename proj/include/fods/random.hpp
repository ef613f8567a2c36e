// Deterministic cross-platform uniform draws for seeded experiments and tests.
#pragma once

#include "fods/types.hpp"

#include <cstdint>
#include <random>

namespace fods {

// mt19937_64 has a standard-mandated bit stream; mapping the top 53 bits onto
// [0,1) keeps draws identical across platforms and library versions (the
// std::uniform_real_distribution algorithm is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  VectorX<double> vector(Eigen::Index n, double lo, double hi) {
    VectorX<double> v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }

  MatrixX<double> matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
    MatrixX<double> m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)     // row-major fill: draw order is part
      for (Eigen::Index c = 0; c < cols; ++c)   // of the determinism contract
        m(r, c) = uniform(lo, hi);
    return m;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fods
