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

// Independent reference computations used only by the tests. None of these
// call into the library's formula code.

#include "misocache/rational.hpp"

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace misocache::oracle {

/// H_n by plain left-to-right summation.
inline Rational harmonic_by_summation(std::int64_t n) {
  Rational sum(0);
  for (std::int64_t i = 1; i <= n; ++i) sum += Rational(BigInt(1), BigInt(i));
  return sum;
}

/// Asymptotic expansion of the harmonic number for large x.
inline long double harmonic_asymptotic(long double x) {
  constexpr long double kEuler = 0.577215664901532860606512090082402431L;
  const long double x2 = x * x;
  return std::log(x) + kEuler + 1.0L / (2 * x) - 1.0L / (12 * x2) + 1.0L / (120 * x2 * x2);
}

/// Brute-force scan of the lower bound in long double: returns every
/// candidate value for s = 1..smax.
inline std::vector<long double> lower_bound_candidates(std::int64_t K, std::int64_t N, long double M, long double alpha) {
  std::int64_t smax = K;
  if (M > 0) smax = std::min<std::int64_t>(K, static_cast<std::int64_t>(std::floor(static_cast<long double>(N) / M)));
  std::vector<long double> out;
  for (std::int64_t s = 1; s <= smax; ++s) {
    long double hs = 0;
    for (std::int64_t i = 1; i <= s; ++i) hs += 1.0L / i;
    out.push_back((hs - M * s / static_cast<long double>(N / s)) / (hs * alpha + 1 - alpha));
  }
  return out;
}

/// Phase durations written out one by one from their defining ratios
/// (bits to send over rate), not from the telescoped sums.
inline std::vector<Rational> phase_durations(std::int64_t K, const Rational& gamma, const Rational& alpha,
                                             const Rational& T) {
  const Rational one(1);
  const Rational xor_bits = gamma * Rational(K * (K - 1) / 2);         // per f
  const Rational t1 = xor_bits / (Rational(K - 1) * (one - alpha));     // K-1 streams
  const Rational pbar = Rational(K) * (one - Rational(K) * gamma - alpha * T);
  const Rational tk = pbar / (Rational(K) * (one - alpha));             // K streams
  std::vector<Rational> d;
  for (std::int64_t j = 1; j <= K - 1; ++j) d.push_back(t1 * Rational(2) / Rational(j + 1));
  for (std::int64_t j = K; j <= 2 * K - 1; ++j) d.push_back(tk / Rational(j - K + 1));
  return d;
}

}  // namespace misocache::oracle
