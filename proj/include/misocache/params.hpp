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

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace misocache {

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A validated (K, N, M, f) instance. gamma = M/N and Gamma = K*gamma are
/// derived at construction and never edited afterwards.
template <class Scalar>
struct BasicParams {
  std::int64_t K = 0;  // users, also transmit antennas
  std::int64_t N = 0;  // files in the library
  Scalar M{};          // cache size per user, in files
  Scalar gamma{};
  Scalar Gamma{};
  std::optional<std::int64_t> f;  // file size in bits; simulation only

  bool operator==(const BasicParams&) const = default;
};

using SystemParams = BasicParams<Rational>;
using ApproxParams = BasicParams<double>;

namespace detail {

template <class Scalar>
BasicParams<Scalar> make_params(std::int64_t K, std::int64_t N, const Scalar& M,
                                std::optional<std::int64_t> f) {
  if (K < 2) throw ParameterError("K < 2: need at least two users");
  if (N < K) throw ParameterError("N < K: library must hold at least K files");
  if (M < 0) throw ParameterError("M < 0: negative cache size");
  if (M > N) throw ParameterError("M > N: cache larger than library");
  if (f && *f <= 0) throw ParameterError("f <= 0: file size must be positive");
  BasicParams<Scalar> p;
  p.K = K;
  p.N = N;
  p.M = M;
  p.gamma = M / Scalar(N);
  p.Gamma = Scalar(K) * p.gamma;
  p.f = f;
  return p;
}

}  // namespace detail

inline SystemParams validate_params(std::int64_t K, std::int64_t N, const Rational& M,
                                    std::optional<std::int64_t> f = std::nullopt) {
  return detail::make_params<Rational>(K, N, M, f);
}

inline ApproxParams validate_params_approx(std::int64_t K, std::int64_t N, double M) {
  if (!std::isfinite(M)) throw ParameterError("M must be finite");
  return detail::make_params<double>(K, N, M, std::nullopt);
}

inline ApproxParams approximate(const SystemParams& p) {
  ApproxParams a;
  a.K = p.K;
  a.N = p.N;
  a.M = to_double(p.M);
  a.gamma = to_double(p.gamma);
  a.Gamma = to_double(p.Gamma);
  a.f = p.f;
  return a;
}

inline std::string describe(const SystemParams& p) {
  return "K=" + std::to_string(p.K) + " N=" + std::to_string(p.N) + " M=" + to_string(p.M);
}

}  // namespace misocache
