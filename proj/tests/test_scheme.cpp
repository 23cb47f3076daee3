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

#include "misocache/library.hpp"
#include "misocache/scheme.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace misocache;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return make_rational(n, d); }

}  // namespace

TEST_CASE("BitString basics", "[scheme][bits]") {
  BitString b(70);
  CHECK(b.size() == 70);
  CHECK(b.count() == 0);
  b.set(0, true);
  b.set(69, true);
  CHECK(b.test(69));
  CHECK(b.count() == 2);
  const BitString s = b.slice(60, 10);
  CHECK(s.size() == 10);
  CHECK(s.test(9));
  CHECK_THROWS_AS(b.slice(65, 10), std::out_of_range);
  BitString c = b;
  c.append(s);
  CHECK(c.size() == 80);
  CHECK(c.test(79));
  CHECK((b ^ b).count() == 0);
  CHECK_THROWS_AS(b ^ s, std::invalid_argument);
  CHECK(BitString::from_words({0xffu}, 4).count() == 4);  // tail bits cleared
  CHECK(BitString::from_words({0xa5u}, 8).to_hex() == "5a");
}

TEST_CASE("mt19937_64 standard test vector", "[scheme][library]") {
  std::mt19937_64 engine;
  engine.discard(9999);
  CHECK(engine() == 9981545732273789042ull);
}

TEST_CASE("library generation is reproducible", "[scheme][library]") {
  const auto p = validate_params(3, 5, q(1), 130);
  const Library a = generate_library(p, 42);
  const Library b = generate_library(p, 42);
  const Library c = generate_library(p, 43);
  REQUIRE(a.files.size() == 5);
  CHECK(a.file(0).size() == 130);
  for (std::int64_t n = 0; n < 5; ++n) CHECK(a.file(n) == b.file(n));
  CHECK_FALSE(a.file(0) == c.file(0));
  // First word of file 0 is the engine's first output, LSB first.
  std::mt19937_64 engine(42);
  CHECK(a.file(0).words()[0] == engine());
}

TEST_CASE("placement of the worked instance", "[scheme]") {
  const auto p = validate_params(4, 8, q(1), 24);
  const auto plan = build_placement(p);
  CHECK(plan.subfile_bits == 3);
  CHECK(plan.cached_part_bits == 12);
  CHECK(plan.uncached_part_bits == 12);
  for (std::int64_t k = 0; k < 4; ++k) {
    CHECK(plan.cache_load_bits(k) == 24);  // M f bits
    CHECK(plan.subfile_offset({5, k}) == 3 * k);
  }
  CHECK_THROWS_AS(build_placement(validate_params(4, 8, q(1), 20)), SchemeError);
  CHECK_THROWS_AS(build_placement(validate_params(4, 8, q(1))), SchemeError);
  CHECK_THROWS_AS(build_placement(validate_params(4, 4, q(2), 8)), PreconditionError);
}

TEST_CASE("phase schedule matches the per-phase duration formulas", "[scheme]") {
  const auto p = validate_params(4, 8, q(1));
  const auto s = build_phase_schedule(p, q(0));
  const std::vector<Rational> expect{q(1, 4), q(1, 6), q(1, 8), q(1, 2), q(1, 4), q(1, 6), q(1, 8)};
  REQUIRE(s.phases.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) CHECK(s.phases[i].duration == expect[i]);
  CHECK(s.first_part == q(13, 24));
  CHECK(s.total == q(19, 12));
  CHECK(s.phase(1).fresh_streams == 3);
  CHECK(s.phase(4).fresh_streams == 4);
  CHECK(s.phase(2).fresh_streams == 0);
  CHECK(s.phase(1).payload == PayloadClass::XorRelay);
  CHECK(s.phase(4).payload == PayloadClass::MatCommon);

  for (std::int64_t K : {2, 3, 6, 11}) {
    for (std::int64_t m : {0, 1, 2}) {
      const auto pk = validate_params(K, 2 * K, q(m));
      const Rational a1 = alpha_breakpoint(pk, 1);
      for (const Rational& a : {q(0), a1 / 3, a1 / 2, a1}) {
        if (a >= 1) continue;
        const auto sk = build_phase_schedule(pk, a);
        const auto d = oracle::phase_durations(K, pk.gamma, a, first_branch_T(pk, a));
        REQUIRE(sk.phases.size() == d.size());
        Rational sum(0);
        for (std::size_t i = 0; i < d.size(); ++i) {
          REQUIRE(sk.phases[i].duration == d[i]);
          sum += d[i];
        }
        REQUIRE(sum == first_branch_T(pk, a));
      }
    }
  }
  CHECK_THROWS_WITH(build_phase_schedule(p, q(3, 5)), Catch::Matchers::ContainsSubstring("12/25"));
  CHECK_THROWS_AS(build_phase_schedule(validate_params(3, 3, q(0)), q(1)), PreconditionError);
}

TEST_CASE("uncached split and file-size granularity", "[scheme]") {
  const auto p0 = validate_params(4, 8, q(1));
  CHECK(least_valid_file_size(p0, q(0)) == 8);
  const Rational a = q(1, 4);
  const std::int64_t f = least_valid_file_size(p0, a);
  const auto p = validate_params(4, 8, q(1), f);
  const Rational T = first_branch_T(p, a);
  CHECK(T == q(76, 61));
  const auto split = split_uncached(p, a, T);
  CHECK(Rational(split.p_bits) == a * T * f);
  CHECK(split.p_bits + split.pbar_bits == f / 2);
  CHECK_THROWS_AS(split_uncached(validate_params(4, 8, q(1), f + 1), a, T), SchemeError);
  // Past the first breakpoint the multicast part would be negative.
  CHECK_THROWS_AS(split_uncached(validate_params(4, 8, q(1), 1000), q(9, 10), first_branch_T(p, q(9, 10))),
                  SchemeError);
}

TEST_CASE("XOR set pairs every two users once", "[scheme]") {
  const auto p = validate_params(4, 8, q(1), 8);
  const auto plan = build_placement(p);
  const Library lib = generate_library(p, 1);
  const RequestVector req{{2, 2, 7, 0}};
  const auto set = build_xor_set(plan, req, lib);
  REQUIRE(set.size() == 6);
  std::set<std::pair<std::int64_t, std::int64_t>> pairs;
  for (const auto& x : set) {
    REQUIRE(x.first < x.second);
    pairs.insert({x.first, x.second});
    // W^c_{R_first, second} xor W^c_{R_second, first}
    const BitString expect = subfile_bits(plan, lib, {req.of(x.first), x.second}) ^
                             subfile_bits(plan, lib, {req.of(x.second), x.first});
    REQUIRE(x.payload == expect);
  }
  CHECK(pairs.size() == 6);
  CHECK(set.front().first == 0);
  CHECK(set.front().second == 1);
  CHECK(set.back().first == 2);
  CHECK(set.back().second == 3);
  CHECK_THROWS_AS(build_xor_set(plan, RequestVector{{0, 1, 2}}, lib), ParameterError);
  CHECK_THROWS_AS(build_xor_set(plan, RequestVector{{0, 1, 2, 8}}, lib), ParameterError);
}

TEST_CASE("coverage ledger balances", "[scheme]") {
  for (const Rational& a : {q(0), q(1, 5), q(12, 25)}) {
    const auto p0 = validate_params(4, 8, q(1));
    const auto p = validate_params(4, 8, q(1), least_valid_file_size(p0, a));
    const auto plan = build_placement(p);
    const auto s = build_phase_schedule(p, a);
    const auto split = split_uncached(p, a, s.total);
    const auto rep = coverage_ledger(plan, s, split, default_requests(p));
    INFO(to_string(a));
    CHECK(rep.ok());
    for (const auto& u : rep.users) CHECK(u.total() == *p.f);
  }
}
