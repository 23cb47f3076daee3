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
#include "misocache/audit.hpp"
#include "misocache/scheme.hpp"
#include "misocache/serialize.hpp"
#include "misocache/simulator.hpp"
#include "misocache/sweep.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace misocache::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitClaimFailed = 1;
inline constexpr int kExitUsage = 2;

/// Options shared by every subcommand. Each may also come from the
/// environment: MISOCACHE_FORMAT, MISOCACHE_OUT, MISOCACHE_THREADS,
/// MISOCACHE_SEED.
struct GlobalOptions {
  std::string format;  // text | csv | json; empty picks the command default
  std::string out;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed = 0;
};

namespace detail {

inline std::string both(const Rational& r) { return to_string(r) + " (" + format_decimal(to_double(r)) + ")"; }

inline Rational parse_alpha(const std::string& s) {
  auto a = parse_rational(s);
  if (!a) throw SpecError("alpha must be a decimal or p/q literal, got '" + s + "'");
  if (*a < 0 || *a > 1) throw SpecError("alpha " + to_string(*a) + " outside [0, 1]");
  return *a;
}

inline Rational parse_m(const std::string& s) {
  auto m = parse_rational(s);
  if (!m) throw SpecError("M must be a decimal or p/q literal, got '" + s + "'");
  return *m;
}

/// Writes through a temporary sibling file renamed into place, so a failed
/// command never leaves a partial output file.
inline void emit(const GlobalOptions& g, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (g.out.empty()) {
    body(out);
    return;
  }
  const std::filesystem::path target(g.out);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  try {
    {
      std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
      if (!file) throw SpecError("cannot open output " + g.out);
      body(file);
      file.flush();
      if (!file) throw SpecError("failed writing output " + g.out);
    }
    std::filesystem::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

inline std::string format_or(const GlobalOptions& g, const std::string& fallback) {
  return g.format.empty() ? fallback : g.format;
}

}  // namespace detail

// compute ------------------------------------------------------------------

struct ComputeArgs {
  std::int64_t K = 0;
  std::int64_t N = 0;
  std::string M;
  std::string alpha;
};

inline int cmd_compute(const ComputeArgs& a, const GlobalOptions& g, std::ostream& out) {
  const SystemParams p = validate_params(a.K, a.N, detail::parse_m(a.M));
  const Rational alpha = detail::parse_alpha(a.alpha);
  const PerformancePoint v = evaluate(p, alpha);
  std::optional<double> delta;
  std::optional<Rational> delta_closed;
  if (p.Gamma <= 1) {
    delta = csit_savings_oracle(p, alpha);
    delta_closed = csit_savings_closed(p, alpha);
  }
  const std::string fmt = detail::format_or(g, "text");
  detail::emit(g, out, [&](std::ostream& os) {
    if (fmt == "csv") {
      write_sweep_csv({SweepRow{{p, alpha}, v, delta}}, os, false);
    } else if (fmt == "json") {
      json j{{"params", params_json(p)}, {"alpha", rational_json(alpha)}, {"performance", performance_json(v)}};
      if (delta) j["delta"] = {{"search", *delta}, {"closed_form", rational_json(*delta_closed)}};
      os << j.dump(2) << '\n';
    } else {
      os << describe(p) << " gamma=" << to_string(p.gamma) << " Gamma=" << to_string(p.Gamma)
         << " alpha=" << to_string(alpha) << '\n';
      os << "regime   " << v.regime.label() << '\n';
      if (v.exact) {
        os << "T        " << detail::both(v.exact->T) << '\n';
        os << "dof      " << detail::both(v.exact->dof) << '\n';
        os << "T_lb     " << detail::both(v.exact->T_lb) << " at s=" << v.argmax_s << '\n';
        os << "gap      " << detail::both(v.exact->gap) << '\n';
      } else {
        os << "T        " << format_decimal(v.T) << '\n';
        os << "dof      " << format_decimal(v.dof) << '\n';
        os << "T_lb     " << format_decimal(v.T_lb) << " at s=" << v.argmax_s << '\n';
        os << "gap      " << format_decimal(v.gap) << '\n';
      }
      if (delta) {
        os << "delta    " << format_decimal(*delta) << " (closed form " << detail::both(*delta_closed) << ")\n";
      }
    }
  });
  return kExitOk;
}

// sweep --------------------------------------------------------------------

struct GridArgs {
  std::string K;
  std::string N;
  std::string N_multiples;
  std::string M;
  std::string Gamma;
  std::string alpha;

  bool any() const { return !(K.empty() && N.empty() && N_multiples.empty() && M.empty() && Gamma.empty() && alpha.empty()); }
};

inline SweepSpec to_spec(const GridArgs& a) {
  SweepSpec s;
  if (a.K.empty()) throw SpecError("--k is required");
  s.K = parse_integer_list(a.K);
  if (!a.N.empty()) s.N = parse_integer_list(a.N);
  if (!a.N_multiples.empty()) s.N_multiples = parse_integer_list(a.N_multiples);
  if (!a.M.empty()) s.M = parse_value_list(a.M);
  if (!a.Gamma.empty()) s.Gamma = parse_value_list(a.Gamma);
  if (a.alpha.empty()) throw SpecError("--alpha is required");
  s.alpha = parse_value_list(a.alpha);
  return s;
}

inline json sweep_row_json(const SweepRow& r) {
  json j{{"params", params_json(r.point.params)}, {"alpha", rational_json(r.point.alpha)},
         {"performance", performance_json(r.perf)}};
  j["delta"] = r.delta ? json(*r.delta) : json(nullptr);
  return j;
}

inline int cmd_sweep(const GridArgs& a, bool with_decimals, const GlobalOptions& g, std::ostream& out) {
  const auto points = expand(to_spec(a));
  const auto rows = evaluate_grid(points, g.threads);
  const std::string fmt = detail::format_or(g, "csv");
  if (fmt != "csv" && fmt != "json") throw SpecError("sweep writes csv or json");
  detail::emit(g, out, [&](std::ostream& os) {
    if (fmt == "json") {
      json arr = json::array();
      for (const auto& r : rows) arr.push_back(sweep_row_json(r));
      os << arr.dump(2) << '\n';
    } else {
      write_sweep_csv(rows, os, with_decimals);
    }
  });
  return kExitOk;
}

// gap-audit ----------------------------------------------------------------

struct GapAuditArgs {
  GridArgs grid;
  double bound = 4.0;
  bool large_k = false;
  std::string large_k_values = "1000,10000,100000,1000000";
};

inline int cmd_gap_audit(const GapAuditArgs& a, const GlobalOptions& g, std::ostream& out) {
  const std::string fmt = detail::format_or(g, "text");
  if (a.large_k) {
    const auto Ks = parse_integer_list(a.large_k_values);
    const auto rows = large_k_audit(Ks, 0.0, g.threads);
    const bool decreasing = strictly_decreasing_gap(rows);
    bool below = true;
    for (const auto& r : rows) below = below && r.gap < a.bound;
    detail::emit(g, out, [&](std::ostream& os) {
      if (fmt == "json") {
        json arr = json::array();
        for (const auto& r : rows)
          arr.push_back({{"K", r.K}, {"gamma", r.gamma}, {"T", r.T}, {"T_lb", r.T_lb}, {"gap", r.gap},
                         {"argmax_s", r.argmax_s}});
        os << json{{"rows", arr}, {"strictly_decreasing", decreasing}, {"below_bound", below}}.dump(2) << '\n';
        return;
      }
      os << "K,gamma,T,T_lb,argmax_s,gap\n";
      for (const auto& r : rows)
        os << r.K << ',' << format_decimal(r.gamma) << ',' << format_decimal(r.T) << ',' << format_decimal(r.T_lb)
           << ',' << r.argmax_s << ',' << format_decimal(r.gap) << '\n';
      os << "trend " << (decreasing ? "strictly decreasing" : "not monotone") << '\n';
    });
    return below ? kExitOk : kExitClaimFailed;
  }

  const SweepSpec spec = a.grid.any() ? to_spec(a.grid) : default_gap_audit_spec();
  const auto result = gap_audit(expand(spec), g.threads, a.bound);
  detail::emit(g, out, [&](std::ostream& os) {
    const SystemParams& p = result.argmax->params;
    if (fmt == "json") {
      os << json{{"points", result.points},
                 {"max_gap", result.max_gap},
                 {"argmax", {{"params", params_json(p)}, {"alpha", rational_json(result.argmax->alpha)}}},
                 {"at_or_above_bound", result.at_or_above_bound},
                 {"below_one", result.below_lower_bound},
                 {"bound", a.bound},
                 {"passed", result.passed()}}
                .dump(2)
         << '\n';
      return;
    }
    os << "points   " << result.points << '\n';
    os << "max gap  " << format_decimal(result.max_gap) << " at " << describe(p)
       << " alpha=" << to_string(result.argmax->alpha) << '\n';
    os << "bound    " << format_decimal(a.bound) << " (" << result.at_or_above_bound << " points at or above)\n";
    os << (result.passed() ? "PASS" : "FAIL") << '\n';
  });
  return result.passed() ? kExitOk : kExitClaimFailed;
}

// simulate -----------------------------------------------------------------

struct SimulateArgs {
  std::int64_t K = 0;
  std::int64_t N = 0;
  std::string M;
  std::string alpha;
  std::optional<std::int64_t> f;
  std::string requests;
  bool suggest_f = false;
  std::string trace;
  bool trace_payload = false;
};

inline int cmd_simulate(const SimulateArgs& a, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const SystemParams base = validate_params(a.K, a.N, detail::parse_m(a.M));
  require_small_cache(base);
  const Rational alpha = detail::parse_alpha(a.alpha);
  const Rational breakpoint = alpha_breakpoint(base, 1);
  if (alpha > breakpoint) throw PreconditionError("alpha above first-branch breakpoint " + to_string(breakpoint));
  if (alpha == 1) throw PreconditionError("alpha = 1 leaves no common stream for the schedule");
  const std::int64_t least = least_valid_file_size(base, alpha);
  if (a.suggest_f) {
    out << least << '\n';
    return kExitOk;
  }
  if (!a.f) {
    err << "error: --f is required; least valid f is " << least << '\n';
    return kExitUsage;
  }
  if (*a.f <= 0 || *a.f % least != 0) {
    const std::int64_t next = *a.f <= 0 ? least : ((*a.f + least - 1) / least) * least;
    err << "error: f=" << *a.f << " does not split into whole bits; least valid f is " << least
        << ", next valid f is " << next << '\n';
    return kExitUsage;
  }
  const SystemParams p = validate_params(a.K, a.N, base.M, a.f);
  std::optional<RequestVector> req;
  if (!a.requests.empty()) {
    RequestVector r;
    r.files = parse_integer_list(a.requests);
    validate_requests(p, r);
    req = r;
  }
  const SimRun run = simulate(p, alpha, g.seed, req);
  if (!a.trace.empty()) {
    GlobalOptions trace_opts = g;
    trace_opts.out = a.trace;
    detail::emit(trace_opts, out, [&](std::ostream& os) { write_trace(run.log, os, a.trace_payload); });
  }
  const SimReport& rep = run.report;
  const std::string fmt = detail::format_or(g, "text");
  detail::emit(g, out, [&](std::ostream& os) {
    if (fmt == "json") {
      os << sim_report_json(rep).dump(2) << '\n';
      return;
    }
    os << describe(p) << " f=" << *p.f << " alpha=" << to_string(alpha) << " seed=" << rep.seed << '\n';
    os << "requests";
    for (auto n : rep.requests.files) os << ' ' << n;
    os << '\n';
    os << "units    " << rep.unit_count << '\n';
    os << "airtime  " << detail::both(rep.airtime) << '\n';
    os << "expected " << detail::both(rep.expected_T) << '\n';
    for (const auto& u : rep.users) {
      os << "user " << u.user << " file " << u.requested << ' ' << (u.match ? "ok" : "MISMATCH");
      if (!u.error.empty()) os << " (" << u.error << ')';
      os << '\n';
    }
    for (const auto& v : rep.coverage.violations) os << "coverage: " << v << '\n';
    os << (rep.success() ? "SUCCESS" : "FAILURE") << '\n';
  });
  return rep.success() ? kExitOk : kExitClaimFailed;
}

// delta --------------------------------------------------------------------

struct DeltaArgs {
  std::int64_t K = 0;
  std::int64_t N = 0;
  std::string M;
  std::string alpha = "0:0.05:1";
  double tolerance = 1e-9;
};

/// Closed form vs search for the CSIT savings. Disagreement on the first or
/// the full-CSIT branch fails the command; middle branches are reported.
inline int cmd_delta(const DeltaArgs& a, const GlobalOptions& g, std::ostream& out) {
  const SystemParams p = validate_params(a.K, a.N, detail::parse_m(a.M));
  require_small_cache(p);
  const auto alphas = parse_value_list(a.alpha);
  for (const auto& x : alphas)
    if (x < 0 || x > 1) throw SpecError("alpha " + to_string(x) + " outside [0, 1]");
  const auto rows = compare_csit_savings(p, alphas);
  bool claim_ok = true;
  for (const auto& r : rows)
    if (r.regime.kind != RegimeTag::Kind::EtaBranch && r.abs_diff() > a.tolerance) claim_ok = false;
  const std::string fmt = detail::format_or(g, "csv");
  detail::emit(g, out, [&](std::ostream& os) {
    if (fmt == "json") {
      json arr = json::array();
      for (const auto& r : rows)
        arr.push_back({{"alpha", rational_json(r.alpha)}, {"regime", regime_json(r.regime)}, {"closed", r.closed},
                       {"search", r.oracle}, {"abs_diff", r.abs_diff()}});
      os << json{{"params", params_json(p)}, {"rows", arr}, {"outer_branches_agree", claim_ok}}.dump(2) << '\n';
      return;
    }
    os << "alpha,regime,closed,search,abs_diff,status\n";
    for (const auto& r : rows) {
      os << to_string(r.alpha) << ',' << r.regime.label() << ',' << format_decimal(r.closed) << ','
         << format_decimal(r.oracle) << ',' << format_decimal(r.abs_diff()) << ','
         << (r.abs_diff() <= a.tolerance ? "agree" : "differ") << '\n';
    }
  });
  return claim_ok ? kExitOk : kExitClaimFailed;
}

// entry point --------------------------------------------------------------

/// Parses `args` (without the program name) and runs one subcommand.
/// Returns 0 on success, 1 when a checked claim fails, 2 on usage errors.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Feedback-aided coded caching for the K-user MISO broadcast channel", "misocache"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--format", g.format, "Output format: text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->envname("MISOCACHE_FORMAT");
  app.add_option("--out", g.out, "Write output to PATH instead of stdout")->envname("MISOCACHE_OUT");
  app.add_option("--threads", g.threads, "Worker threads for sweeps and audits")
      ->check(CLI::PositiveNumber)
      ->envname("MISOCACHE_THREADS");
  app.add_option("--seed", g.seed, "Library seed for simulations")->envname("MISOCACHE_SEED");

  std::function<int()> action;

  ComputeArgs ca;
  auto* compute = app.add_subcommand("compute", "Delivery time, DoF, lower bound and gap at one point")->fallthrough();
  compute->add_option("--k", ca.K, "Users")->required();
  compute->add_option("--n", ca.N, "Files")->required();
  compute->add_option("--m", ca.M, "Cache size in files")->required();
  compute->add_option("--alpha", ca.alpha, "CSIT quality exponent")->required();
  compute->callback([&] { action = [&] { return cmd_compute(ca, g, out); }; });

  GridArgs sa;
  bool with_decimals = false;
  auto add_grid = [](CLI::App* sub, GridArgs& grid) {
    sub->add_option("--k", grid.K, "K values, e.g. 2..50");
    sub->add_option("--n", grid.N, "N values");
    sub->add_option("--n-mult", grid.N_multiples, "N as multiples of K, e.g. 1,2,4");
    sub->add_option("--m", grid.M, "M values");
    sub->add_option("--gamma-cum", grid.Gamma, "Cumulative cache Gamma values (M = Gamma N / K)");
    sub->add_option("--alpha", grid.alpha, "alpha values, e.g. 0:0.05:1");
  };
  auto* sweep = app.add_subcommand("sweep", "Evaluate a parameter grid to CSV or JSON")->fallthrough();
  add_grid(sweep, sa);
  sweep->add_flag("--with-decimals", with_decimals, "Append decimal columns for exact values");
  sweep->callback([&] { action = [&] { return cmd_sweep(sa, with_decimals, g, out); }; });

  GapAuditArgs ga;
  auto* audit = app.add_subcommand("gap-audit", "Scan a grid and check the gap to the lower bound")->fallthrough();
  add_grid(audit, ga.grid);
  audit->add_option("--bound", ga.bound, "Gap bound to check against");
  audit->add_flag("--large-k", ga.large_k, "Evaluate large K with gamma = K^-1/2 instead of a grid");
  audit->add_option("--large-k-values", ga.large_k_values, "K values for --large-k");
  audit->callback([&] { action = [&] { return cmd_gap_audit(ga, g, out); }; });

  SimulateArgs si;
  std::int64_t f_value = 0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Bit-exact end-to-end run of the first-branch scheme")->fallthrough();
  simulate_cmd->add_option("--k", si.K, "Users")->required();
  simulate_cmd->add_option("--n", si.N, "Files")->required();
  simulate_cmd->add_option("--m", si.M, "Cache size in files")->required();
  simulate_cmd->add_option("--alpha", si.alpha, "CSIT quality exponent (exact: p/q or decimal)")->required();
  auto* f_opt = simulate_cmd->add_option("--f", f_value, "File size in bits");
  simulate_cmd->add_option("--requests", si.requests, "Requested file per user, e.g. 0,0,1,2");
  simulate_cmd->add_flag("--suggest-f", si.suggest_f, "Print the least valid file size and exit");
  simulate_cmd->add_option("--trace", si.trace, "Write the transmission trace to PATH");
  simulate_cmd->add_flag("--trace-payload", si.trace_payload, "Include payload hex in the trace");
  simulate_cmd->callback([&] {
    if (f_opt->count() > 0) si.f = f_value;
    action = [&] { return cmd_simulate(si, g, out, err); };
  });

  DeltaArgs da;
  auto* delta = app.add_subcommand("delta", "Closed-form vs search table of CSIT savings")->fallthrough();
  delta->add_option("--k", da.K, "Users")->required();
  delta->add_option("--n", da.N, "Files")->required();
  delta->add_option("--m", da.M, "Cache size in files")->required();
  delta->add_option("--alpha", da.alpha, "alpha values");
  delta->add_option("--tolerance", da.tolerance, "Agreement tolerance");
  delta->callback([&] { action = [&] { return cmd_delta(da, g, out); }; });

  std::vector<std::string> argv_storage{"misocache"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    return action();
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const SpecError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const SchemeError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace misocache::cli
