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
#include "misocache/scheme.hpp"
#include "misocache/simulator.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <string>

namespace misocache {

using nlohmann::json;

namespace detail {

inline json big_to_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(v);
  }
  return v.str();
}

}  // namespace detail

/// Rationals serialize as {"num": n, "den": d}; components outside the
/// 64-bit range are written as decimal strings.
inline json rational_json(const Rational& r) {
  return {{"num", detail::big_to_json(numerator_of(r))}, {"den", detail::big_to_json(denominator_of(r))}};
}

inline json params_json(const SystemParams& p) {
  json j{{"K", p.K}, {"N", p.N}, {"M", rational_json(p.M)}, {"gamma", rational_json(p.gamma)},
         {"Gamma", rational_json(p.Gamma)}};
  j["f"] = p.f ? json(*p.f) : json(nullptr);
  return j;
}

inline json regime_json(const RegimeTag& r) {
  json j{{"kind", r.name()}};
  if (r.kind == RegimeTag::Kind::EtaBranch) j["eta"] = r.eta;
  return j;
}

inline json performance_json(const PerformancePoint& pt) {
  json j{{"T", pt.T},         {"dof", pt.dof}, {"T_lb", pt.T_lb}, {"gap", pt.gap}, {"regime", regime_json(pt.regime)},
         {"argmax_s", pt.argmax_s}};
  if (pt.exact) {
    j["exact"] = {{"T", rational_json(pt.exact->T)},
                  {"dof", rational_json(pt.exact->dof)},
                  {"T_lb", rational_json(pt.exact->T_lb)},
                  {"gap", rational_json(pt.exact->gap)}};
  }
  return j;
}

inline json placement_json(const PlacementPlan& plan) {
  json caches = json::array();
  for (const auto& cache : plan.cache_assignment) {
    json ids = json::array();
    for (const auto& id : cache) ids.push_back({{"file", id.file}, {"user", id.user}});
    caches.push_back(std::move(ids));
  }
  return {{"params", params_json(plan.params)},
          {"subfile_bits", plan.subfile_bits},
          {"cached_part_bits", plan.cached_part_bits},
          {"uncached_part_bits", plan.uncached_part_bits},
          {"cache_assignment", std::move(caches)}};
}

inline json split_json(const UncachedSplit& s) { return {{"p_bits", s.p_bits}, {"pbar_bits", s.pbar_bits}}; }

inline json schedule_json(const PhaseSchedule& s) {
  json phases = json::array();
  for (const auto& ph : s.phases) {
    phases.push_back({{"index", ph.index},
                      {"payload_class", std::string(to_string(ph.payload))},
                      {"start", rational_json(ph.start)},
                      {"duration", rational_json(ph.duration)},
                      {"fresh_streams", ph.fresh_streams}});
  }
  return {{"alpha", rational_json(s.alpha)},         {"phases", std::move(phases)},
          {"T1_duration", rational_json(s.T1)},      {"T_first_part", rational_json(s.first_part)},
          {"T_second_part", rational_json(s.second_part)}, {"total", rational_json(s.total)},
          {"common_rate", rational_json(Rational(1) - s.alpha)}, {"zf_rate", rational_json(s.alpha)}};
}

inline json coverage_json(const CoverageReport& c) {
  json users = json::array();
  for (const auto& u : c.users) {
    users.push_back({{"user", u.user},
                     {"bits_from_own_cache", u.own_cache},
                     {"bits_from_xors", u.xors},
                     {"bits_from_zf", u.zf},
                     {"bits_from_mat_common", u.mat_common},
                     {"total", u.total()}});
  }
  return {{"file_bits", c.file_bits}, {"users", std::move(users)}, {"violations", c.violations}};
}

inline json sim_report_json(const SimReport& r) {
  json users = json::array();
  for (const auto& u : r.users) {
    json entry{{"user", u.user}, {"requested", u.requested}, {"match", u.match}};
    if (!u.error.empty()) entry["error"] = u.error;
    users.push_back(std::move(entry));
  }
  return {{"params", params_json(r.params)},
          {"alpha", rational_json(r.alpha)},
          {"seed", r.seed},
          {"requests", r.requests.files},
          {"users", std::move(users)},
          {"airtime", rational_json(r.airtime)},
          {"expected_T", rational_json(r.expected_T)},
          {"units", r.unit_count},
          {"coverage", coverage_json(r.coverage)},
          {"success", r.success()}};
}

}  // namespace misocache
