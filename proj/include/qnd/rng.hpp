// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cmath>

#include <Eigen/Core>

namespace qnd {

// Counter-based random stream in the splitmix64 family: the k-th output is
// a fixed bijective mix of (key + k*gamma), so streams advance in O(1),
// never touch global state, and two streams with distinct (seed, stream)
// pairs are statistically independent. Serial and parallel trajectory runs
// therefore produce bitwise-identical draws.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(mix(seed + kGolden) ^ mix(stream + kStreamSalt))) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the paired variate is cached.
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // CDF-inversion draw from a (non-negative, ~normalized) weight vector.
  // The final index absorbs any rounding slack.
  int sample_discrete(const Eigen::VectorXd& probabilities) {
    const double u = next_double() * probabilities.sum();
    double acc = 0.0;
    const int n = static_cast<int>(probabilities.size());
    for (int i = 0; i < n; ++i) {
      acc += probabilities[i];
      if (u < acc) return i;
    }
    return n - 1;
  }

private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace qnd
