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
#include "misocache/bits.hpp"
#include "misocache/library.hpp"
#include "misocache/params.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace misocache {

/// The construction cannot be carried out bit-exactly for these inputs.
class SchemeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline std::int64_t exact_bits(const Rational& bits, std::string_view what) {
  if (!is_integer(bits)) {
    throw SchemeError(std::string(what) + " = " + to_string(bits) + " bits is not an integer");
  }
  return static_cast<std::int64_t>(numerator_of(bits));
}

inline std::int64_t file_bits(const SystemParams& p) {
  if (!p.f) throw SchemeError("file size f is required to size the placement");
  return *p.f;
}

}  // namespace detail

/// W^c_{file,user}: the user-th slice of the cached part of a file.
struct SubfileId {
  std::int64_t file = 0;
  std::int64_t user = 0;

  auto operator<=>(const SubfileId&) const = default;
};

/// Non-overlapping placement: every file keeps its first K gamma f bits as
/// K slices of gamma f bits, slice k going to user k's cache; the remaining
/// (1 - K gamma) f bits are never cached.
struct PlacementPlan {
  SystemParams params;
  std::int64_t subfile_bits = 0;
  std::int64_t cached_part_bits = 0;
  std::int64_t uncached_part_bits = 0;
  std::vector<std::vector<SubfileId>> cache_assignment;  // per user

  std::int64_t cache_load_bits(std::int64_t user) const {
    return static_cast<std::int64_t>(cache_assignment.at(static_cast<std::size_t>(user)).size()) * subfile_bits;
  }

  std::int64_t subfile_offset(const SubfileId& id) const { return id.user * subfile_bits; }
};

inline PlacementPlan build_placement(const SystemParams& p) {
  require_small_cache(p);
  const std::int64_t f = detail::file_bits(p);
  PlacementPlan plan;
  plan.params = p;
  plan.subfile_bits = detail::exact_bits(p.gamma * f, "gamma*f");
  plan.cached_part_bits = plan.subfile_bits * p.K;
  plan.uncached_part_bits = f - plan.cached_part_bits;
  plan.cache_assignment.resize(static_cast<std::size_t>(p.K));
  for (std::int64_t k = 0; k < p.K; ++k) {
    auto& cache = plan.cache_assignment[static_cast<std::size_t>(k)];
    cache.reserve(static_cast<std::size_t>(p.N));
    for (std::int64_t n = 0; n < p.N; ++n) cache.push_back({n, k});
  }
  return plan;
}

inline BitString subfile_bits(const PlacementPlan& plan, const Library& lib, const SubfileId& id) {
  return lib.file(id.file).slice(static_cast<std::size_t>(plan.subfile_offset(id)),
                                 static_cast<std::size_t>(plan.subfile_bits));
}

/// Sizes of the two pieces of each requested file's uncached part: p_bits
/// go out privately by zero-forcing, pbar_bits by delayed-CSIT multicast.
/// Within the uncached part, the ZF piece comes first.
struct UncachedSplit {
  std::int64_t p_bits = 0;     // alpha f T
  std::int64_t pbar_bits = 0;  // f (1 - K gamma - alpha T)
};

inline UncachedSplit split_uncached(const SystemParams& p, const Rational& alpha, const Rational& T) {
  require_small_cache(p);
  require_alpha(alpha);
  const std::int64_t f = detail::file_bits(p);
  const Rational pbar = Rational(f) * (Rational(1) - p.Gamma - alpha * T);
  if (pbar < 0) {
    throw SchemeError("negative delayed-CSIT part " + to_string(pbar) +
                      ": alpha lies outside the first-branch regime");
  }
  return {detail::exact_bits(alpha * f * T, "alpha*f*T"), detail::exact_bits(pbar, "f*(1-Gamma-alpha*T)")};
}

/// File index requested by each user (0-based users and files). Repeats are
/// allowed.
struct RequestVector {
  std::vector<std::int64_t> files;

  std::int64_t of(std::int64_t user) const { return files.at(static_cast<std::size_t>(user)); }
};

inline void validate_requests(const SystemParams& p, const RequestVector& r) {
  if (static_cast<std::int64_t>(r.files.size()) != p.K) throw ParameterError("need exactly one request per user");
  for (auto n : r.files)
    if (n < 0 || n >= p.N) throw ParameterError("request names a file outside the library");
}

/// Distinct requests: user k asks for file k.
inline RequestVector default_requests(const SystemParams& p) {
  RequestVector r;
  for (std::int64_t k = 0; k < p.K; ++k) r.files.push_back(k);
  return r;
}

/// Order-2 XOR for the user pair {first, second}: W^c_{R_first, second}
/// combined with W^c_{R_second, first}.
struct XorMessage {
  std::int64_t first = 0;   // lower user index
  std::int64_t second = 0;  // higher user index
  std::array<SubfileId, 2> components;
  BitString payload;

  bool serves(std::int64_t user) const { return user == first || user == second; }
  std::int64_t partner(std::int64_t user) const { return user == first ? second : first; }
};

/// One XOR per unordered user pair, pairs in lexicographic order.
inline std::vector<XorMessage> build_xor_set(const PlacementPlan& plan, const RequestVector& requests,
                                             const Library& lib) {
  const SystemParams& p = plan.params;
  validate_requests(p, requests);
  std::vector<XorMessage> set;
  set.reserve(static_cast<std::size_t>(p.K * (p.K - 1) / 2));
  for (std::int64_t k = 0; k < p.K; ++k) {
    for (std::int64_t i = k + 1; i < p.K; ++i) {
      XorMessage x;
      x.first = k;
      x.second = i;
      x.components = {SubfileId{requests.of(k), i}, SubfileId{requests.of(i), k}};
      x.payload = subfile_bits(plan, lib, x.components[0]) ^ subfile_bits(plan, lib, x.components[1]);
      set.push_back(std::move(x));
    }
  }
  return set;
}

enum class PayloadClass { XorRelay, MatCommon };

inline std::string_view to_string(PayloadClass c) {
  return c == PayloadClass::XorRelay ? "XorRelay" : "MatCommon";
}

/// One delivery phase. Times are in units of the normalized delivery time
/// (slots per file). `fresh_streams` is the number of common streams that
/// carry new payload, each at (1 - alpha) f bits per slot; the other phases
/// only relay overheard interference (MAT) and add no new payload.
struct Phase {
  std::int64_t index = 0;  // 1-based, 1 .. 2K-1
  PayloadClass payload = PayloadClass::XorRelay;
  Rational start;
  Rational duration;
  std::int64_t fresh_streams = 0;

  Rational end() const { return start + duration; }
};

struct PhaseSchedule {
  Rational alpha;
  std::vector<Phase> phases;
  Rational T1;
  Rational first_part;   // phases 1 .. K-1
  Rational second_part;  // phases K .. 2K-1
  Rational total;

  /// Common-stream rate in bits per slot for file size f: (1 - alpha) f.
  Rational common_rate_bits(std::int64_t f) const { return (Rational(1) - alpha) * f; }
  /// Zero-forcing rate per user in bits per slot: alpha f.
  Rational zf_rate_bits(std::int64_t f) const { return alpha * f; }

  Rational fresh_capacity_bits(const Phase& ph, std::int64_t f) const {
    return Rational(ph.fresh_streams) * common_rate_bits(f) * ph.duration;
  }

  const Phase& phase(std::int64_t index) const { return phases.at(static_cast<std::size_t>(index - 1)); }
};

/// 2K-1 phase durations of the first-branch scheme. Valid for
/// 0 <= alpha <= alpha_{b,1} and alpha < 1.
inline PhaseSchedule build_phase_schedule(const SystemParams& p, const Rational& alpha) {
  require_small_cache(p);
  require_alpha(alpha);
  if (alpha >= 1) throw PreconditionError("alpha must be below 1 for the phase schedule");
  const Rational breakpoint = alpha_breakpoint(p, 1);
  if (alpha > breakpoint) {
    throw PreconditionError("alpha above first-branch breakpoint " + to_string(breakpoint));
  }
  const std::int64_t K = p.K;
  const Rational one(1);
  const Rational T = first_branch_T(p, alpha);

  PhaseSchedule s;
  s.alpha = alpha;
  s.T1 = p.gamma * Rational(K * (K - 1) / 2) / (Rational(K - 1) * (one - alpha));
  const Rational TK = (one - p.Gamma - alpha * T) / (one - alpha);

  Rational clock(0);
  for (std::int64_t j = 1; j <= 2 * K - 1; ++j) {
    Phase ph;
    ph.index = j;
    ph.start = clock;
    if (j <= K - 1) {
      ph.payload = PayloadClass::XorRelay;
      ph.duration = Rational(2) / Rational(j + 1) * s.T1;
      ph.fresh_streams = j == 1 ? K - 1 : 0;
      s.first_part += ph.duration;
    } else {
      ph.payload = PayloadClass::MatCommon;
      ph.duration = TK / Rational(j - K + 1);
      ph.fresh_streams = j == K ? K : 0;
      s.second_part += ph.duration;
    }
    clock += ph.duration;
    s.phases.push_back(std::move(ph));
  }
  s.total = clock;

  const Rational hk = harmonic(K);
  if (s.first_part != p.Gamma * (hk - one) / (one - alpha) || s.second_part != hk * TK || s.total != T) {
    throw std::logic_error("phase durations do not telescope to the closed form");
  }
  return s;
}

/// Per-user bit accounting of how the requested file is assembled.
struct UserCoverage {
  std::int64_t user = 0;
  std::int64_t own_cache = 0;
  std::int64_t xors = 0;
  std::int64_t zf = 0;
  std::int64_t mat_common = 0;

  std::int64_t total() const { return own_cache + xors + zf + mat_common; }
};

struct CoverageReport {
  std::int64_t file_bits = 0;
  std::vector<UserCoverage> users;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Derives each source's contribution from the plan and the schedule's rate
/// budgets, and flags any mismatch against the split or the file size.
inline CoverageReport coverage_ledger(const PlacementPlan& plan, const PhaseSchedule& schedule,
                                      const UncachedSplit& split, const RequestVector& requests) {
  const SystemParams& p = plan.params;
  validate_requests(p, requests);
  const std::int64_t f = *p.f;
  CoverageReport report;
  report.file_bits = f;

  const Rational zf_budget = schedule.zf_rate_bits(f) * schedule.total;
  const Rational common_budget = schedule.fresh_capacity_bits(schedule.phase(p.K), f) / Rational(p.K);
  const Rational xor_budget = schedule.fresh_capacity_bits(schedule.phase(1), f);
  const Rational xor_load = Rational(p.K * (p.K - 1) / 2) * plan.subfile_bits;
  if (p.K > 1 && xor_budget != xor_load) {
    report.violations.push_back("phase 1 capacity " + to_string(xor_budget) + " differs from XOR load " +
                                to_string(xor_load));
  }
  if (!is_integer(zf_budget) || !is_integer(common_budget)) {
    report.violations.push_back("fractional rate budget");
    return report;
  }

  for (std::int64_t k = 0; k < p.K; ++k) {
    UserCoverage u;
    u.user = k;
    // Z_k holds slice k of every file, including the requested one.
    u.own_cache = plan.subfile_bits;
    // One XOR for each partner.
    u.xors = (p.K - 1) * plan.subfile_bits;
    u.zf = static_cast<std::int64_t>(numerator_of(zf_budget));
    u.mat_common = static_cast<std::int64_t>(numerator_of(common_budget));
    const std::string who = "user " + std::to_string(k) + ": ";
    if (u.zf != split.p_bits) report.violations.push_back(who + "ZF budget differs from the private split");
    if (u.mat_common != split.pbar_bits) report.violations.push_back(who + "common budget differs from the multicast split");
    if (u.total() < f) report.violations.push_back(who + "under-covered by " + std::to_string(f - u.total()) + " bits");
    if (u.total() > f) report.violations.push_back(who + "over-covered by " + std::to_string(u.total() - f) + " bits");
    report.users.push_back(u);
  }
  return report;
}

/// Least f making gamma f, alpha f T and f (1 - Gamma - alpha T) integers.
inline std::int64_t least_valid_file_size(const SystemParams& p, const Rational& alpha) {
  require_small_cache(p);
  const Rational T = first_branch_T(p, alpha);
  BigInt l = 1;
  for (const Rational& r : {p.gamma, alpha * T, Rational(1) - p.Gamma - alpha * T}) l = lcm_of(l, denominator_of(r));
  if (l > BigInt(std::numeric_limits<std::int64_t>::max())) throw SchemeError("least valid file size overflows 64 bits");
  return static_cast<std::int64_t>(l);
}

}  // namespace misocache
