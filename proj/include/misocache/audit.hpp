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

#include "misocache/analysis.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace misocache {

// Breakpoint ordering and branch ordering ---------------------------------

struct Lemma1Violation {
  std::string what;
  std::int64_t eta = 0;
  std::optional<Rational> alpha;
};

struct Lemma1Report {
  std::vector<Rational> breakpoints;  // alpha_{b,1} .. alpha_{b,K-1}
  std::vector<Lemma1Violation> violations;
  std::size_t checks = 0;

  bool passed() const { return violations.empty(); }
};

/// Checks that alpha_{b,eta} strictly increases with eta and that the eta
/// branch value strictly decreases with eta at every alpha < 1 of the grid.
/// At alpha = 1 all eta branches equal 1 - gamma, so equality is required
/// there instead. With no cache every breakpoint equals 1 and the eta
/// branches are never selected, so only the branch ordering is checked.
inline Lemma1Report audit_lemma1(const SystemParams& p, std::span<const Rational> alphas) {
  require_small_cache(p);
  Lemma1Report report;
  for (std::int64_t eta = 1; eta <= p.K - 1; ++eta) report.breakpoints.push_back(alpha_breakpoint(p, eta));
  for (std::int64_t eta = 1; eta <= p.K - 2; ++eta) {
    ++report.checks;
    if (p.Gamma > 0 && !(report.breakpoints[eta] > report.breakpoints[eta - 1])) {
      report.violations.push_back({"breakpoint not strictly increasing", eta, std::nullopt});
    }
    for (const Rational& a : alphas) {
      ++report.checks;
      const Rational lower = eta_branch_T(p, a, eta);
      const Rational upper = eta_branch_T(p, a, eta + 1);
      const bool ok = a < 1 ? lower > upper : lower == upper;
      if (!ok) report.violations.push_back({"branch value not decreasing in eta", eta, a});
    }
  }
  return report;
}

// Branch agreement at breakpoints -----------------------------------------

struct BreakpointCheck {
  std::int64_t eta = 0;  // the breakpoint alpha_{b,eta}
  Rational alpha;
  RegimeTag left;
  RegimeTag right;
  Rational left_value;
  Rational right_value;

  bool agrees() const { return left_value == right_value; }
};

struct ContinuityReport {
  std::vector<BreakpointCheck> checks;
  /// alpha_{b,K-1} == (K-1-Gamma) / ((K-1)(1-gamma)).
  bool last_breakpoint_identity = false;
  /// 1 - Gamma - alpha_{b,1} T(alpha_{b,1}) == 0.
  bool split_vanishes_at_first_breakpoint = false;

  bool continuous() const {
    for (const auto& c : checks)
      if (!c.agrees()) return false;
    return true;
  }
};

namespace detail {

inline Rational branch_value(const SystemParams& p, const Rational& alpha, const RegimeTag& tag) {
  switch (tag.kind) {
    case RegimeTag::Kind::FirstBranch: return first_branch_T(p, alpha);
    case RegimeTag::Kind::EtaBranch: return eta_branch_T(p, alpha, tag.eta);
    default: return Rational(1) - p.gamma;
  }
}

}  // namespace detail

/// Evaluates the two neighbouring closed forms at every breakpoint
/// alpha_{b,1} .. alpha_{b,K-1} in exact arithmetic.
inline ContinuityReport audit_continuity(const SystemParams& p) {
  require_small_cache(p);
  ContinuityReport report;
  const std::int64_t K = p.K;
  auto branch_after = [K](std::int64_t eta) {
    return eta <= K - 2 ? RegimeTag::eta_branch(eta) : RegimeTag::full_csit();
  };
  for (std::int64_t eta = 1; eta <= K - 1; ++eta) {
    BreakpointCheck c;
    c.eta = eta;
    c.alpha = alpha_breakpoint(p, eta);
    c.left = eta == 1 ? RegimeTag::first() : RegimeTag::eta_branch(eta - 1);
    c.right = branch_after(eta);
    c.left_value = detail::branch_value(p, c.alpha, c.left);
    c.right_value = detail::branch_value(p, c.alpha, c.right);
    report.checks.push_back(std::move(c));
  }
  report.last_breakpoint_identity = alpha_breakpoint(p, K - 1) == full_csit_threshold(p);
  const Rational a1 = alpha_breakpoint(p, 1);
  report.split_vanishes_at_first_breakpoint = Rational(1) - p.Gamma - a1 * first_branch_T(p, a1) == 0;
  return report;
}

// Closed form vs search for the CSIT savings ------------------------------

struct DeltaRow {
  Rational alpha;
  RegimeTag regime;
  double closed = 0;
  double oracle = 0;

  double abs_diff() const { return std::abs(closed - oracle); }
};

inline std::vector<DeltaRow> compare_csit_savings(const SystemParams& p, std::span<const Rational> alphas) {
  std::vector<DeltaRow> rows;
  rows.reserve(alphas.size());
  for (const Rational& a : alphas) {
    rows.push_back({a, select_eta(p, a), to_double(csit_savings_closed(p, a)), csit_savings_oracle(p, a)});
  }
  return rows;
}

/// Alpha grid {0, step, 2 step, ..., 1}.
inline std::vector<Rational> alpha_grid(const Rational& step) {
  if (step <= 0) throw std::invalid_argument("alpha step must be positive");
  std::vector<Rational> grid;
  for (Rational a = 0; a <= 1; a += step) grid.push_back(a);
  return grid;
}

}  // namespace misocache
