#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

#include "vopt/errors.hpp"

namespace vopt {

// Deterministic scalar/vector sampler. mt19937_64 output is fully specified by
// the standard; the mappings below avoid std::*_distribution, whose streams
// are implementation-defined and would break byte-identical reports across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 usable bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Marsaglia polar method; deterministic given the engine stream.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * scale;
    have_spare_ = true;
    return u * scale;
  }

  Eigen::VectorXd unit_vector(int dim) {
    if (dim < 1) throw DimensionError("unit_vector: dimension must be positive");
    Eigen::VectorXd v(dim);
    double norm = 0.0;
    do {
      for (int i = 0; i < dim; ++i) v[i] = gaussian();
      norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
  }

  // Uniform over an axis-aligned box given as (lo, hi) pairs.
  Eigen::VectorXd box_point(const std::vector<std::pair<double, double>>& box) {
    Eigen::VectorXd v(static_cast<int>(box.size()));
    for (std::size_t i = 0; i < box.size(); ++i)
      v[static_cast<int>(i)] = uniform(box[i].first, box[i].second);
    return v;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Low-discrepancy points in the closed unit ball, by rejection from the
// Halton cube. Used for perturbation sets where even coverage matters more
// than randomness.
class HaltonBall {
 public:
  explicit HaltonBall(int dim) : dim_(dim) {
    static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (dim < 1 || dim > static_cast<int>(sizeof(primes) / sizeof(primes[0])))
      throw DimensionError("HaltonBall: dimension out of supported range");
    bases_.assign(primes, primes + dim);
  }

  Eigen::VectorXd next() {
    Eigen::VectorXd q(dim_);
    for (;;) {
      ++index_;
      for (int i = 0; i < dim_; ++i) q[i] = 2.0 * radical_inverse(index_, bases_[i]) - 1.0;
      if (q.norm() <= 1.0) return q;
    }
  }

 private:
  static double radical_inverse(std::uint64_t n, int base) {
    double inv = 1.0 / base, result = 0.0, frac = inv;
    while (n > 0) {
      result += static_cast<double>(n % base) * frac;
      n /= base;
      frac *= inv;
    }
    return result;
  }

  int dim_;
  std::vector<int> bases_;
  std::uint64_t index_ = 0;
};

}  // namespace vopt
