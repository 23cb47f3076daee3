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

#include "misocache/harmonic.hpp"
#include "misocache/params.hpp"
#include "misocache/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace misocache {

/// A formula was asked for outside the regime where it is defined.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by the exact path when a value has no rational closed form
/// (H_Gamma for non-integer Gamma).
class NotExactError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Which closed-form expression produced an achievable delivery time.
struct RegimeTag {
  enum class Kind { FirstBranch, EtaBranch, FullCsitBranch, LargeGamma };

  Kind kind = Kind::FirstBranch;
  std::int64_t eta = 0;  // only meaningful for EtaBranch

  static RegimeTag first() { return {Kind::FirstBranch, 0}; }
  static RegimeTag eta_branch(std::int64_t eta) { return {Kind::EtaBranch, eta}; }
  static RegimeTag full_csit() { return {Kind::FullCsitBranch, 0}; }
  static RegimeTag large_gamma() { return {Kind::LargeGamma, 0}; }

  bool operator==(const RegimeTag&) const = default;

  std::string name() const {
    switch (kind) {
      case Kind::FirstBranch: return "FirstBranch";
      case Kind::EtaBranch: return "EtaBranch";
      case Kind::FullCsitBranch: return "FullCsitBranch";
      case Kind::LargeGamma: return "LargeGamma";
    }
    return "?";
  }

  std::string label() const {
    return kind == Kind::EtaBranch ? name() + "(" + std::to_string(eta) + ")" : name();
  }
};

template <class Scalar>
void require_small_cache(const BasicParams<Scalar>& p) {
  if (p.Gamma > Scalar(1)) throw PreconditionError("Gamma > 1: small-cache regime needs KM <= N");
}

template <class Scalar>
void require_alpha(const Scalar& alpha) {
  if (alpha < Scalar(0) || alpha > Scalar(1)) throw PreconditionError("alpha outside [0, 1]");
}

/// CSIT quality at which the redundancy parameter eta becomes usable:
/// (eta - Gamma) / (Gamma (H_K - H_eta - 1) + eta).
template <class Scalar>
Scalar alpha_breakpoint(const BasicParams<Scalar>& p, std::int64_t eta) {
  require_small_cache(p);
  if (eta < 1 || eta > p.K - 1) throw std::out_of_range("eta must lie in [1, K-1]");
  const Scalar hk = harmonic_as<Scalar>(p.K);
  const Scalar he = harmonic_as<Scalar>(eta);
  const Scalar e(eta);
  return (e - p.Gamma) / (p.Gamma * (hk - he - Scalar(1)) + e);
}

/// Smallest alpha for which T = 1 - gamma is achievable (and optimal).
template <class Scalar>
Scalar full_csit_threshold(const BasicParams<Scalar>& p) {
  require_small_cache(p);
  const Scalar km1(p.K - 1);
  return (km1 - p.Gamma) / (km1 * (Scalar(1) - p.gamma));
}

template <class Scalar>
RegimeTag select_eta(const BasicParams<Scalar>& p, const Scalar& alpha) {
  require_small_cache(p);
  require_alpha(alpha);
  if (alpha >= full_csit_threshold(p)) return RegimeTag::full_csit();
  if (alpha < alpha_breakpoint(p, 1)) return RegimeTag::first();
  // Breakpoints increase with eta; the highest one not above alpha wins.
  std::int64_t eta = 1;
  while (eta + 1 <= p.K - 2 && alpha_breakpoint(p, eta + 1) <= alpha) ++eta;
  return RegimeTag::eta_branch(eta);
}

/// (H_K - Gamma) / (1 - alpha + alpha H_K).
template <class Scalar>
Scalar first_branch_T(const BasicParams<Scalar>& p, const Scalar& alpha) {
  const Scalar hk = harmonic_as<Scalar>(p.K);
  return (hk - p.Gamma) / (Scalar(1) - alpha + alpha * hk);
}

/// (K - Gamma)(H_K - H_eta) / ((K - eta) + alpha (eta + K (H_K - H_eta - 1))).
/// Defined for eta in [1, K-1]; eta = K-1 collapses to 1 - gamma.
template <class Scalar>
Scalar eta_branch_T(const BasicParams<Scalar>& p, const Scalar& alpha, std::int64_t eta) {
  if (eta < 1 || eta > p.K - 1) throw std::out_of_range("eta must lie in [1, K-1]");
  const Scalar hk = harmonic_as<Scalar>(p.K);
  const Scalar he = harmonic_as<Scalar>(eta);
  const Scalar k(p.K);
  const Scalar e(eta);
  return (k - p.Gamma) * (hk - he) / ((k - e) + alpha * (e + k * (hk - he - Scalar(1))));
}

template <class Scalar>
struct BranchValue {
  Scalar T;
  RegimeTag regime;
};

/// Achievable delivery time for Gamma <= 1 (three-branch closed form).
template <class Scalar>
BranchValue<Scalar> achievable_T_small(const BasicParams<Scalar>& p, const Scalar& alpha) {
  const RegimeTag regime = select_eta(p, alpha);
  switch (regime.kind) {
    case RegimeTag::Kind::FirstBranch: return {first_branch_T(p, alpha), regime};
    case RegimeTag::Kind::EtaBranch: return {eta_branch_T(p, alpha, regime.eta), regime};
    default: return {Scalar(1) - p.gamma, regime};
  }
}

/// H_Gamma; exact only when Gamma is an integer.
template <class Scalar>
Scalar harmonic_of_cumulative_cache(const BasicParams<Scalar>& p);

template <>
inline Rational harmonic_of_cumulative_cache<Rational>(const SystemParams& p) {
  if (!is_integer(p.Gamma)) throw NotExactError("H_Gamma has no exact value for Gamma = " + to_string(p.Gamma));
  return harmonic(static_cast<std::int64_t>(numerator_of(p.Gamma)));
}

template <>
inline double harmonic_of_cumulative_cache<double>(const ApproxParams& p) {
  return p.Gamma == 0.0 ? 0.0 : harmonic_general(p.Gamma);
}

/// Achievable delivery time for Gamma >= 1:
/// (1 - gamma)(H_K - H_Gamma) / (alpha (H_K - H_Gamma) + (1 - alpha)(1 - gamma)).
template <class Scalar>
Scalar achievable_T_large(const BasicParams<Scalar>& p, const Scalar& alpha) {
  if (p.Gamma < Scalar(1)) throw PreconditionError("Gamma < 1: large-cache formula needs KM >= N");
  require_alpha(alpha);
  // Every file fully cached: nothing left to deliver.
  if (p.gamma == Scalar(1)) return Scalar(0);
  const Scalar diff = harmonic_as<Scalar>(p.K) - harmonic_of_cumulative_cache(p);
  const Scalar uncached = Scalar(1) - p.gamma;
  return uncached * diff / (alpha * diff + (Scalar(1) - alpha) * uncached);
}

template <class Scalar>
struct Achievable {
  Scalar T;
  Scalar dof;
  RegimeTag regime;
};

/// Per-user cache-aided DoF (1 - gamma) / T; a fully cached library counts
/// as DoF 1.
template <class Scalar>
Scalar dof_of(const BasicParams<Scalar>& p, const Scalar& T) {
  if (T == Scalar(0)) return Scalar(1);
  return (Scalar(1) - p.gamma) / T;
}

template <class Scalar>
Achievable<Scalar> achievable_T(const BasicParams<Scalar>& p, const Scalar& alpha) {
  if (p.Gamma <= Scalar(1)) {
    auto [T, regime] = achievable_T_small(p, alpha);
    return {T, dof_of(p, T), regime};
  }
  Scalar T = achievable_T_large(p, alpha);
  return {T, dof_of(p, T), RegimeTag::large_gamma()};
}

template <class Scalar>
struct LowerBound {
  Scalar value;
  std::int64_t argmax_s = 1;
};

/// Largest user-subset index the lower bound scans: min(K, floor(N/M)),
/// or K when M = 0.
template <class Scalar>
std::int64_t lower_bound_range(const BasicParams<Scalar>& p) {
  if (p.M == Scalar(0)) return p.K;
  std::int64_t cap;
  if constexpr (std::is_same_v<Scalar, Rational>) {
    cap = static_cast<std::int64_t>(floor_of(Rational(p.N) / p.M));
  } else {
    cap = static_cast<std::int64_t>(std::floor(static_cast<double>(p.N) / p.M));
  }
  return std::max<std::int64_t>(1, std::min(p.K, cap));
}

/// max over s of (H_s - M s / floor(N/s)) / (alpha H_s + 1 - alpha).
/// Ties resolve to the smallest s.
template <class Scalar>
LowerBound<Scalar> lower_bound_T(const BasicParams<Scalar>& p, const Scalar& alpha) {
  require_alpha(alpha);
  const std::int64_t smax = lower_bound_range(p);
  LowerBound<Scalar> best{Scalar(0), 1};
  Scalar hs(0);
  for (std::int64_t s = 1; s <= smax; ++s) {
    if constexpr (std::is_same_v<Scalar, Rational>) {
      hs = harmonic(s);
    } else {
      hs = s <= 64 ? harmonic_approx(s) : hs + 1.0 / static_cast<double>(s);
    }
    const Scalar penalty = p.M * Scalar(s) / Scalar(p.N / s);
    const Scalar value = (hs - penalty) / (hs * alpha + Scalar(1) - alpha);
    if (s == 1 || value > best.value) best = {value, s};
  }
  return best;
}

/// T / T_lb; the degenerate 0/0 of a fully cached library is reported as 1.
template <class Scalar>
Scalar gap_of(const Scalar& T, const Scalar& T_lb) {
  if (T_lb == Scalar(0)) {
    if (T == Scalar(0)) return Scalar(1);
    throw std::logic_error("lower bound vanished while T > 0");
  }
  return T / T_lb;
}

template <class Scalar>
Scalar gap(const BasicParams<Scalar>& p, const Scalar& alpha) {
  return gap_of(achievable_T(p, alpha).T, lower_bound_T(p, alpha).value);
}

template <class Scalar>
struct Performance {
  Scalar T;
  Scalar dof;
  Scalar T_lb;
  Scalar gap;
  RegimeTag regime;
  std::int64_t argmax_s = 1;
};

template <class Scalar>
Performance<Scalar> evaluate_as(const BasicParams<Scalar>& p, const Scalar& alpha) {
  const auto a = achievable_T(p, alpha);
  const auto lb = lower_bound_T(p, alpha);
  return {a.T, a.dof, lb.value, gap_of(a.T, lb.value), a.regime, lb.argmax_s};
}

/// Floating summary of one (params, alpha) point plus the exact rational
/// values whenever the closed forms admit them.
struct PerformancePoint {
  double T = 0;
  double dof = 0;
  double T_lb = 0;
  double gap = 0;
  RegimeTag regime;
  std::int64_t argmax_s = 1;
  std::optional<Performance<Rational>> exact;
};

inline PerformancePoint from_approx(const Performance<double>& v) {
  return {v.T, v.dof, v.T_lb, v.gap, v.regime, v.argmax_s, std::nullopt};
}

inline PerformancePoint evaluate(const ApproxParams& p, double alpha) {
  return from_approx(evaluate_as(p, alpha));
}

inline PerformancePoint evaluate(const SystemParams& p, const Rational& alpha) {
  const bool exact_ok = p.K <= kExactHarmonicLimit && (p.Gamma <= 1 || is_integer(p.Gamma));
  if (!exact_ok) return evaluate(approximate(p), to_double(alpha));
  auto v = evaluate_as(p, alpha);
  PerformancePoint out{to_double(v.T), to_double(v.dof), to_double(v.T_lb), to_double(v.gap),
                       v.regime, v.argmax_s, std::nullopt};
  out.exact = std::move(v);
  return out;
}

/// CSIT savings from caching, piecewise closed form (Gamma <= 1).
template <class Scalar>
Scalar csit_savings_closed(const BasicParams<Scalar>& p, const Scalar& alpha) {
  const RegimeTag regime = select_eta(p, alpha);
  const Scalar hk = harmonic_as<Scalar>(p.K);
  const Scalar k(p.K);
  const Scalar one(1);
  switch (regime.kind) {
    case RegimeTag::Kind::FirstBranch:
      return p.gamma * (k - hk) / (hk - k * p.gamma) * (alpha + one / (hk - one));
    case RegimeTag::Kind::EtaBranch: {
      const std::int64_t eta = regime.eta;
      const Scalar he = harmonic_as<Scalar>(eta);
      const Scalar he1 = harmonic_as<Scalar>(eta + 1);
      return (one - alpha) * (k * he - Scalar(eta) * hk) / (k * he1 * (hk - one));
    }
    default: return one - alpha;
  }
}

/// CSIT savings by direct search: the least alpha' with
/// (1 - gamma) T(gamma=0, alpha') <= T(gamma, alpha), minus alpha.
/// The cacheless reference is H_K / (1 - alpha' + alpha' H_K); alpha' is
/// found by bisection to 1e-13 and never exceeds 1.
inline double csit_savings_oracle(const ApproxParams& p, double alpha) {
  const double T = achievable_T_small(p, alpha).T;
  const double hk = harmonic_approx(p.K);
  const double scale = 1.0 - p.gamma;
  auto meets = [&](double a) { return scale * (hk / (1.0 - a + a * hk)) <= T; };
  if (meets(0.0)) return 0.0 - alpha;
  if (!meets(1.0)) return 1.0 - alpha;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (meets(mid) ? hi : lo) = mid;
  }
  return hi - alpha;
}

inline double csit_savings_oracle(const SystemParams& p, const Rational& alpha) {
  return csit_savings_oracle(approximate(p), to_double(alpha));
}

/// T(gamma = K^-(1-zeta), 0) / H_K: the caching gain when the cache grows
/// like K^zeta. Evaluated in floating point with N = K.
inline double asymptotic_ratio(std::int64_t K, double zeta) {
  if (K < 2) throw ParameterError("K < 2: need at least two users");
  if (!(zeta >= 0.0 && zeta < 1.0)) throw ParameterError("zeta must lie in [0, 1)");
  const double k = static_cast<double>(K);
  const ApproxParams p = validate_params_approx(K, K, std::pow(k, zeta));
  if (p.Gamma < 1.0) throw PreconditionError("Gamma < 1");
  return achievable_T_large(p, 0.0) / harmonic_approx(K);
}

/// Best gain from uncoded local caching relative to no caching: 1 - gamma.
template <class Scalar>
Scalar local_caching_ratio(const BasicParams<Scalar>& p) {
  return Scalar(1) - p.gamma;
}

}  // namespace misocache
