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
#include "misocache/scheme.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace misocache {

/// A phase was loaded past its rate budget. Indicates an internal
/// inconsistency between the schedule and the split.
class RateBudgetError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A receiver lacks a unit it needs to rebuild its file.
class MissingUnitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class UnitKind { XorMulticast, MatCommon, ZfPrivate };

inline std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::XorMulticast: return "XorMulticast";
    case UnitKind::MatCommon: return "MatCommon";
    case UnitKind::ZfPrivate: return "ZfPrivate";
  }
  return "?";
}

/// One payload delivered over the abstract channel.
///
/// `offset` is the position of the payload inside the receiver's requested
/// file for MatCommon and ZfPrivate units, and 0 for XOR units (which mix
/// slices of two files). [start, end) is the unit's airtime extent; ZF units
/// run in parallel with the common streams and span their whole phase.
struct DeliveredUnit {
  std::int64_t phase = 0;
  UnitKind kind = UnitKind::XorMulticast;
  std::vector<std::int64_t> users;
  std::int64_t offset = 0;
  Rational start;
  Rational end;
  BitString payload;

  std::int64_t bits() const { return static_cast<std::int64_t>(payload.size()); }
};

struct TransmissionLog {
  std::vector<DeliveredUnit> units;
  Rational airtime;
};

namespace detail {

inline std::int64_t floor_int(const Rational& r) { return static_cast<std::int64_t>(floor_of(r)); }

inline void check_budgets(const TransmissionLog& log, const PhaseSchedule& schedule, const PlacementPlan& plan,
                          const UncachedSplit& split) {
  const SystemParams& p = plan.params;
  const std::int64_t f = *p.f;
  std::map<std::int64_t, std::int64_t> fresh_per_phase;
  std::vector<std::int64_t> zf_per_user(static_cast<std::size_t>(p.K), 0);
  for (const auto& u : log.units) {
    const Phase& ph = schedule.phase(u.phase);
    if (u.start < ph.start || u.end > ph.end() || u.start > u.end) {
      throw RateBudgetError("unit extent leaves phase " + std::to_string(u.phase));
    }
    if (u.kind == UnitKind::ZfPrivate) {
      zf_per_user[static_cast<std::size_t>(u.users.front())] += u.bits();
    } else {
      fresh_per_phase[u.phase] += u.bits();
    }
  }
  for (const Phase& ph : schedule.phases) {
    const Rational cap = schedule.fresh_capacity_bits(ph, f);
    if (Rational(fresh_per_phase[ph.index]) > cap) {
      throw RateBudgetError("phase " + std::to_string(ph.index) + " carries more common bits than its budget");
    }
  }
  const Rational xor_cap = schedule.fresh_capacity_bits(schedule.phase(1), f);
  const Rational common_cap = schedule.fresh_capacity_bits(schedule.phase(p.K), f);
  if (Rational(fresh_per_phase[1]) != xor_cap || Rational(fresh_per_phase[p.K]) != common_cap) {
    throw RateBudgetError("common streams not filled exactly");
  }
  const Rational zf_cap = schedule.zf_rate_bits(f) * schedule.total;
  for (auto bits : zf_per_user) {
    if (Rational(bits) > zf_cap || bits != split.p_bits) throw RateBudgetError("ZF load differs from alpha f T");
  }
}

}  // namespace detail

/// Loads the schedule with payload.
///
/// Phase 1 carries every order-2 XOR back to back in lexicographic pair
/// order; phases 2..K-1 relay overheard interference only. Phase K carries
/// each user's delayed-CSIT piece, users in index order; phases K+1..2K-1
/// again only relay. Each user's ZF piece is spread over all phases in
/// proportion to their durations, phase j taking the bits between
/// floor(alpha f C_{j-1}) and floor(alpha f C_j), C_j the cumulative time.
inline TransmissionLog run_delivery(const PlacementPlan& plan, const PhaseSchedule& schedule,
                                    const UncachedSplit& split, const Library& lib, const RequestVector& requests) {
  const SystemParams& p = plan.params;
  validate_requests(p, requests);
  if (lib.file_bits != *p.f || static_cast<std::int64_t>(lib.files.size()) != p.N) {
    throw SchemeError("library shape does not match the parameters");
  }
  TransmissionLog log;

  if (plan.subfile_bits > 0) {
    const Phase& ph = schedule.phase(1);
    auto xors = build_xor_set(plan, requests, lib);
    const Rational slot = ph.duration / Rational(static_cast<std::int64_t>(xors.size()));
    std::int64_t i = 0;
    for (auto& x : xors) {
      log.units.push_back({1, UnitKind::XorMulticast, {x.first, x.second}, 0, ph.start + slot * Rational(i),
                           ph.start + slot * Rational(i + 1), std::move(x.payload)});
      ++i;
    }
  }

  const std::int64_t uncached_start = plan.cached_part_bits;
  if (split.pbar_bits > 0) {
    const Phase& ph = schedule.phase(p.K);
    const Rational slot = ph.duration / Rational(p.K);
    for (std::int64_t k = 0; k < p.K; ++k) {
      const std::int64_t offset = uncached_start + split.p_bits;
      log.units.push_back({p.K, UnitKind::MatCommon, {k}, offset, ph.start + slot * Rational(k),
                           ph.start + slot * Rational(k + 1),
                           lib.file(requests.of(k)).slice(static_cast<std::size_t>(offset),
                                                          static_cast<std::size_t>(split.pbar_bits))});
    }
  }

  if (split.p_bits > 0) {
    const Rational rate = schedule.zf_rate_bits(*p.f);
    for (const Phase& ph : schedule.phases) {
      const std::int64_t from = detail::floor_int(rate * ph.start);
      const std::int64_t to = ph.index == static_cast<std::int64_t>(schedule.phases.size())
                                  ? split.p_bits
                                  : detail::floor_int(rate * ph.end());
      if (to == from) continue;
      for (std::int64_t k = 0; k < p.K; ++k) {
        const std::int64_t offset = uncached_start + from;
        log.units.push_back({ph.index, UnitKind::ZfPrivate, {k}, offset, ph.start, ph.end(),
                             lib.file(requests.of(k)).slice(static_cast<std::size_t>(offset),
                                                            static_cast<std::size_t>(to - from))});
      }
    }
  }

  log.airtime = schedule.total;
  detail::check_budgets(log, schedule, plan, split);
  return log;
}

/// Contents of one user's cache: slice `user` of every file.
struct UserCache {
  std::int64_t user = 0;
  std::map<std::int64_t, BitString> slices;  // file index -> W^c_{file,user}
};

inline UserCache fill_cache(const PlacementPlan& plan, const Library& lib, std::int64_t user) {
  UserCache cache;
  cache.user = user;
  for (const SubfileId& id : plan.cache_assignment.at(static_cast<std::size_t>(user))) {
    cache.slices.emplace(id.file, subfile_bits(plan, lib, id));
  }
  return cache;
}

/// Rebuilds W_{R_k} from the cache and the log: the K cached-part slices in
/// slice order (own slice from the cache, the others by stripping the
/// partner's cached slice off each XOR), then the uncached part from the ZF
/// and common units sorted by offset.
inline BitString decode_user(std::int64_t k, const UserCache& cache, const TransmissionLog& log,
                             const PlacementPlan& plan, const RequestVector& requests) {
  const SystemParams& p = plan.params;
  validate_requests(p, requests);
  const std::string who = "user " + std::to_string(k);
  auto cached = [&](std::int64_t file) -> const BitString& {
    auto it = cache.slices.find(file);
    if (it == cache.slices.end()) throw MissingUnitError(who + ": cache lacks a slice of file " + std::to_string(file));
    return it->second;
  };

  BitString out;
  for (std::int64_t i = 0; i < p.K; ++i) {
    if (i == k) {
      out.append(cached(requests.of(k)));
      continue;
    }
    if (plan.subfile_bits == 0) continue;
    const auto lo = std::min(i, k);
    const auto hi = std::max(i, k);
    auto it = std::find_if(log.units.begin(), log.units.end(), [&](const DeliveredUnit& u) {
      return u.kind == UnitKind::XorMulticast && u.users.size() == 2 && u.users[0] == lo && u.users[1] == hi;
    });
    if (it == log.units.end()) {
      throw MissingUnitError(who + ": missing XOR for pair {" + std::to_string(lo) + "," + std::to_string(hi) + "}");
    }
    out.append(it->payload ^ cached(requests.of(i)));
  }

  std::vector<const DeliveredUnit*> pieces;
  for (const auto& u : log.units) {
    if (u.kind != UnitKind::XorMulticast && u.users.size() == 1 && u.users[0] == k) pieces.push_back(&u);
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const DeliveredUnit* a, const DeliveredUnit* b) { return a->offset < b->offset; });
  std::int64_t cursor = plan.cached_part_bits;
  for (const DeliveredUnit* u : pieces) {
    if (u->offset != cursor) throw MissingUnitError(who + ": gap in uncached data at bit " + std::to_string(cursor));
    out.append(u->payload);
    cursor += u->bits();
  }
  if (cursor != *p.f) throw MissingUnitError(who + ": uncached data ends at bit " + std::to_string(cursor));
  return out;
}

struct UserResult {
  std::int64_t user = 0;
  std::int64_t requested = 0;
  bool match = false;
  std::string error;
};

struct SimReport {
  SystemParams params;
  Rational alpha;
  std::uint64_t seed = 0;
  RequestVector requests;
  std::vector<UserResult> users;
  Rational airtime;
  Rational expected_T;
  CoverageReport coverage;
  std::size_t unit_count = 0;

  bool all_decoded() const {
    return std::all_of(users.begin(), users.end(), [](const UserResult& u) { return u.match; });
  }
  bool success() const { return all_decoded() && airtime == expected_T && coverage.ok(); }
};

struct SimRun {
  SimReport report;
  TransmissionLog log;
};

/// Runs placement, delivery and decoding end to end and checks every user
/// recovers its file bit for bit within the closed-form delivery time.
inline SimRun simulate(const SystemParams& p, const Rational& alpha, std::uint64_t seed,
                       const std::optional<RequestVector>& requests = std::nullopt) {
  require_small_cache(p);
  require_alpha(alpha);
  const Rational breakpoint = alpha_breakpoint(p, 1);
  if (alpha > breakpoint) throw PreconditionError("alpha above first-branch breakpoint " + to_string(breakpoint));
  const RequestVector req = requests ? *requests : default_requests(p);
  validate_requests(p, req);

  const PlacementPlan plan = build_placement(p);
  const PhaseSchedule schedule = build_phase_schedule(p, alpha);
  const UncachedSplit split = split_uncached(p, alpha, schedule.total);
  const Library lib = generate_library(p, seed);

  SimRun run;
  run.log = run_delivery(plan, schedule, split, lib, req);
  SimReport& rep = run.report;
  rep.params = p;
  rep.alpha = alpha;
  rep.seed = seed;
  rep.requests = req;
  rep.airtime = run.log.airtime;
  rep.expected_T = achievable_T_small(p, alpha).T;
  rep.coverage = coverage_ledger(plan, schedule, split, req);
  rep.unit_count = run.log.units.size();
  for (std::int64_t k = 0; k < p.K; ++k) {
    UserResult r;
    r.user = k;
    r.requested = req.of(k);
    try {
      r.match = decode_user(k, fill_cache(plan, lib, k), run.log, plan, req) == lib.file(r.requested);
    } catch (const MissingUnitError& e) {
      r.error = e.what();
    }
    rep.users.push_back(std::move(r));
  }
  return run;
}

inline SimReport verify_all(const SystemParams& p, const Rational& alpha, std::uint64_t seed,
                            const std::optional<RequestVector>& requests = std::nullopt) {
  return simulate(p, alpha, seed, requests).report;
}

/// Line-delimited trace, one unit per line:
/// phase <TAB> tag <TAB> users <TAB> bits <TAB> offset [<TAB> payload-hex]
inline void write_trace(const TransmissionLog& log, std::ostream& os, bool with_payload = false) {
  os << "# phase\ttag\tusers\tbits\toffset" << (with_payload ? "\tpayload" : "") << '\n';
  for (const auto& u : log.units) {
    os << u.phase << '\t' << to_string(u.kind) << '\t';
    for (std::size_t i = 0; i < u.users.size(); ++i) os << (i ? "," : "") << u.users[i];
    os << '\t' << u.bits() << '\t' << u.offset;
    if (with_payload) os << '\t' << u.payload.to_hex();
    os << '\n';
  }
}

}  // namespace misocache
