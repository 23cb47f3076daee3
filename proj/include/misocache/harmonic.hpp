/*
 * Copyright 2026 The misocache Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "misocache/rational.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace misocache {

/// Exact evaluation is used up to this index; past it callers switch to
/// the floating-point path.
inline constexpr std::int64_t kExactHarmonicLimit = 10000;

namespace detail {

// Sum of 1/i for i in [lo, hi) as an unreduced fraction (binary splitting).
inline std::pair<BigInt, BigInt> harmonic_split(std::int64_t lo, std::int64_t hi) {
  if (hi - lo == 1) return {BigInt(1), BigInt(lo)};
  const std::int64_t mid = lo + (hi - lo) / 2;
  auto [p1, q1] = harmonic_split(lo, mid);
  auto [p2, q2] = harmonic_split(mid, hi);
  return {p1 * q2 + p2 * q1, q1 * q2};
}

class HarmonicTable {
 public:
  Rational get(std::int64_t n) {
    std::lock_guard lock(mutex_);
    if (n < static_cast<std::int64_t>(values_.size())) return values_[n];
    if (n <= kIncrementalLimit) {
      while (static_cast<std::int64_t>(values_.size()) <= n) {
        const auto i = static_cast<std::int64_t>(values_.size());
        values_.push_back(values_.back() + Rational(BigInt(1), BigInt(i)));
      }
      return values_[n];
    }
    auto [p, q] = harmonic_split(1, n + 1);
    return Rational(p, q);
  }

  static HarmonicTable& instance() {
    static HarmonicTable table;
    return table;
  }

 private:
  static constexpr std::int64_t kIncrementalLimit = 1024;
  HarmonicTable() : values_{Rational(0)} {}
  std::mutex mutex_;
  std::vector<Rational> values_;
};

}  // namespace detail

/// H_n = 1 + 1/2 + ... + 1/n exactly; H_0 = 0.
inline Rational harmonic(std::int64_t n) {
  if (n < 0) throw std::domain_error("harmonic number of a negative index");
  return detail::HarmonicTable::instance().get(n);
}

/// Generalized harmonic number psi(x + 1) + Euler-Mascheroni, defined for
/// real x > 0 and equal to H_n at integers.
inline double harmonic_general(double x) {
  if (!(x > 0.0)) throw std::domain_error("generalized harmonic number needs x > 0");
  return boost::math::digamma(x + 1.0) + boost::math::constants::euler<double>();
}

/// Floating-point H_n for any n, summed directly for small n.
inline double harmonic_approx(std::int64_t n) {
  if (n < 0) throw std::domain_error("harmonic number of a negative index");
  if (n == 0) return 0.0;
  if (n <= 64) {
    double sum = 0.0;
    for (std::int64_t i = n; i >= 1; --i) sum += 1.0 / static_cast<double>(i);
    return sum;
  }
  return harmonic_general(static_cast<double>(n));
}

/// epsilon_n = H_n - ln(n), the logarithmic approximation error.
inline double harmonic_log_error(std::int64_t n) {
  if (n < 1) throw std::domain_error("log error needs n >= 1");
  return harmonic_approx(n) - std::log(static_cast<double>(n));
}

/// Scalar-dispatched H_n: exact for Rational, floating for double.
template <class Scalar>
Scalar harmonic_as(std::int64_t n);

template <>
inline Rational harmonic_as<Rational>(std::int64_t n) { return harmonic(n); }

template <>
inline double harmonic_as<double>(std::int64_t n) { return harmonic_approx(n); }

}  // namespace misocache
