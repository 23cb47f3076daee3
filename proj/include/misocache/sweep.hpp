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
#include "misocache/parallel.hpp"
#include "misocache/params.hpp"
#include "misocache/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace misocache {

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline Rational must_parse(std::string_view s) {
  auto r = parse_rational(s);
  if (!r) throw SpecError("not a number: '" + std::string(s) + "'");
  return *r;
}

}  // namespace detail

/// Parses a value list: comma-separated items, each a single value, an
/// inclusive integer range "a..b", or an inclusive progression
/// "start:step:stop". Values are exact ("0.05" is 1/20).
inline std::vector<Rational> parse_value_list(std::string_view text) {
  std::vector<Rational> out;
  if (text.empty()) throw SpecError("empty value list");
  for (std::string_view item : detail::split(text, ',')) {
    if (item.empty()) throw SpecError("empty item in value list");
    if (auto dots = item.find(".."); dots != std::string_view::npos) {
      const Rational lo = detail::must_parse(item.substr(0, dots));
      const Rational hi = detail::must_parse(item.substr(dots + 2));
      if (!is_integer(lo) || !is_integer(hi)) throw SpecError("a..b ranges take integers");
      for (Rational v = lo; v <= hi; v += 1) out.push_back(v);
    } else if (item.find(':') != std::string_view::npos) {
      auto parts = detail::split(item, ':');
      if (parts.size() != 3) throw SpecError("progression must be start:step:stop");
      const Rational start = detail::must_parse(parts[0]);
      const Rational step = detail::must_parse(parts[1]);
      const Rational stop = detail::must_parse(parts[2]);
      if (step <= 0) throw SpecError("progression step must be positive");
      for (Rational v = start; v <= stop; v += step) out.push_back(v);
    } else {
      out.push_back(detail::must_parse(item));
    }
  }
  if (out.empty()) throw SpecError("value list selects nothing");
  return out;
}

inline std::vector<std::int64_t> parse_integer_list(std::string_view text) {
  std::vector<std::int64_t> out;
  for (const Rational& v : parse_value_list(text)) {
    if (!is_integer(v)) throw SpecError("expected integers, got " + to_string(v));
    out.push_back(static_cast<std::int64_t>(numerator_of(v)));
  }
  return out;
}

/// Grid of (K, N, M, alpha) points. N is given either directly or as
/// multiples of K; M either directly or as cumulative cache Gamma, in which
/// case M = Gamma N / K.
struct SweepSpec {
  std::vector<std::int64_t> K;
  std::vector<std::int64_t> N;
  std::vector<std::int64_t> N_multiples;
  std::vector<Rational> M;
  std::vector<Rational> Gamma;
  std::vector<Rational> alpha;
};

struct GridPoint {
  SystemParams params;
  Rational alpha;
};

/// Every combination of the spec, validated, deduplicated and ordered
/// lexicographically by (K, N, M, alpha).
inline std::vector<GridPoint> expand(const SweepSpec& spec) {
  if (spec.K.empty()) throw SpecError("no K values");
  if (spec.N.empty() == spec.N_multiples.empty()) throw SpecError("give exactly one of N values or N multiples");
  if (spec.M.empty() == spec.Gamma.empty()) throw SpecError("give exactly one of M values or Gamma values");
  if (spec.alpha.empty()) throw SpecError("no alpha values");
  for (const auto& a : spec.alpha)
    if (a < 0 || a > 1) throw SpecError("alpha " + to_string(a) + " outside [0, 1]");

  std::vector<GridPoint> points;
  for (std::int64_t K : spec.K) {
    std::vector<std::int64_t> Ns = spec.N;
    if (Ns.empty())
      for (auto m : spec.N_multiples) Ns.push_back(m * K);
    for (std::int64_t N : Ns) {
      std::vector<Rational> Ms = spec.M;
      if (Ms.empty())
        for (const auto& g : spec.Gamma) Ms.push_back(g * Rational(N) / Rational(K));
      for (const Rational& M : Ms) {
        SystemParams p;
        try {
          p = validate_params(K, N, M);
        } catch (const ParameterError& e) {
          throw SpecError("grid point K=" + std::to_string(K) + " N=" + std::to_string(N) + " M=" + to_string(M) +
                          ": " + e.what());
        }
        for (const Rational& a : spec.alpha) points.push_back({p, a});
      }
    }
  }
  auto key = [](const GridPoint& g) { return std::tie(g.params.K, g.params.N, g.params.M, g.alpha); };
  std::sort(points.begin(), points.end(), [&](const GridPoint& a, const GridPoint& b) { return key(a) < key(b); });
  points.erase(std::unique(points.begin(), points.end(),
                           [&](const GridPoint& a, const GridPoint& b) { return key(a) == key(b); }),
               points.end());
  return points;
}

struct SweepRow {
  GridPoint point;
  PerformancePoint perf;
  std::optional<double> delta;  // CSIT savings (search), Gamma <= 1 only
};

inline std::vector<SweepRow> evaluate_grid(const std::vector<GridPoint>& points, unsigned threads) {
  std::vector<SweepRow> rows(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const GridPoint& g = points[i];
    SweepRow row{g, evaluate(g.params, g.alpha), std::nullopt};
    if (g.params.Gamma <= 1) row.delta = csit_savings_oracle(g.params, g.alpha);
    rows[i] = std::move(row);
  });
  return rows;
}

inline std::string format_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline constexpr std::string_view kSweepHeader = "K,N,M,gamma,Gamma,alpha,regime,eta,T,dof,T_lb,argmax_s,gap,delta";

/// One CSV line per row. Values with an exact form print as p/q, the rest
/// as 15-significant-digit decimals. `with_decimals` appends decimal
/// companions of T, dof, T_lb and gap.
inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os, bool with_decimals) {
  os << kSweepHeader;
  if (with_decimals) os << ",T_dec,dof_dec,T_lb_dec,gap_dec";
  os << '\n';
  for (const auto& r : rows) {
    const SystemParams& p = r.point.params;
    const PerformancePoint& v = r.perf;
    os << p.K << ',' << p.N << ',' << to_string(p.M) << ',' << to_string(p.gamma) << ',' << to_string(p.Gamma) << ','
       << to_string(r.point.alpha) << ',' << v.regime.name() << ',';
    if (v.regime.kind == RegimeTag::Kind::EtaBranch) os << v.regime.eta;
    os << ',';
    if (v.exact) {
      os << to_string(v.exact->T) << ',' << to_string(v.exact->dof) << ',' << to_string(v.exact->T_lb) << ','
         << v.argmax_s << ',' << to_string(v.exact->gap);
    } else {
      os << format_decimal(v.T) << ',' << format_decimal(v.dof) << ',' << format_decimal(v.T_lb) << ','
         << v.argmax_s << ',' << format_decimal(v.gap);
    }
    os << ',';
    if (r.delta) os << format_decimal(*r.delta);
    if (with_decimals) {
      os << ',' << format_decimal(v.T) << ',' << format_decimal(v.dof) << ',' << format_decimal(v.T_lb) << ','
         << format_decimal(v.gap);
    }
    os << '\n';
  }
}

// Gap audits --------------------------------------------------------------

/// The default audit grid: K = 2..50, N in {K, 2K, 4K},
/// Gamma in {0, 1/4, 1/2, 3/4, 1}, alpha in {0, 0.05, ..., 1}.
inline SweepSpec default_gap_audit_spec() {
  SweepSpec s;
  s.K = parse_integer_list("2..50");
  s.N_multiples = {1, 2, 4};
  s.Gamma = parse_value_list("0,1/4,1/2,3/4,1");
  s.alpha = parse_value_list("0:0.05:1");
  return s;
}

struct GapAuditResult {
  std::size_t points = 0;
  double max_gap = 0;
  std::optional<GridPoint> argmax;
  std::size_t at_or_above_bound = 0;
  std::size_t below_lower_bound = 0;  // T < T_lb would mean a broken bound

  bool passed() const { return at_or_above_bound == 0 && below_lower_bound == 0; }
};

inline GapAuditResult gap_audit(const std::vector<GridPoint>& points, unsigned threads, double bound = 4.0) {
  auto rows = evaluate_grid(points, threads);
  GapAuditResult out;
  out.points = rows.size();
  for (const auto& r : rows) {
    const bool above = r.perf.exact ? r.perf.exact->gap >= Rational(bound) : r.perf.gap >= bound;
    const bool below = r.perf.exact ? r.perf.exact->gap < 1 : r.perf.gap < 1.0 - 1e-12;
    out.at_or_above_bound += above;
    out.below_lower_bound += below;
    if (!out.argmax || r.perf.gap > out.max_gap) {
      out.max_gap = r.perf.gap;
      out.argmax = r.point;
    }
  }
  return out;
}

struct LargeKRow {
  std::int64_t K = 0;
  double gamma = 0;
  double T = 0;
  double T_lb = 0;
  double gap = 0;
  std::int64_t argmax_s = 1;
};

/// Gap at large K with gamma = K^{-1/2} (N = K, M = sqrt(K)), floating
/// point throughout.
inline std::vector<LargeKRow> large_k_audit(const std::vector<std::int64_t>& Ks, double alpha, unsigned threads) {
  std::vector<LargeKRow> rows(Ks.size());
  parallel_for(Ks.size(), threads, [&](std::size_t i) {
    const std::int64_t K = Ks[i];
    const ApproxParams p = validate_params_approx(K, K, std::sqrt(static_cast<double>(K)));
    const auto v = evaluate(p, alpha);
    rows[i] = {K, p.gamma, v.T, v.T_lb, v.gap, v.argmax_s};
  });
  return rows;
}

inline bool strictly_decreasing_gap(const std::vector<LargeKRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].gap < rows[i - 1].gap)) return false;
  return true;
}

}  // namespace misocache
