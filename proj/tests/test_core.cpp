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

#include "misocache/harmonic.hpp"
#include "misocache/params.hpp"
#include "misocache/rational.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace misocache;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return make_rational(n, d); }

}  // namespace

TEST_CASE("rational literals parse exactly", "[core][rational]") {
  CHECK(*parse_rational("3") == q(3));
  CHECK(*parse_rational("-3/4") == q(-3, 4));
  CHECK(*parse_rational("6/8") == q(3, 4));
  CHECK(*parse_rational("0.05") == q(1, 20));
  CHECK(*parse_rational(".5") == q(1, 2));
  CHECK(*parse_rational("31.6") == q(158, 5));
  CHECK_FALSE(parse_rational("1/0"));
  CHECK_FALSE(parse_rational("abc"));
  CHECK_FALSE(parse_rational("1e-3"));
  CHECK_FALSE(parse_rational(""));
  CHECK(to_string(q(12, 25)) == "12/25");
  CHECK(to_string(q(4, 2)) == "2");
  CHECK(floor_of(q(-7, 2)) == -4);
  CHECK(floor_of(q(7, 2)) == 3);
}

TEST_CASE("harmonic numbers are exact", "[core][harmonic]") {
  CHECK(harmonic(0) == 0);
  CHECK(harmonic(1) == 1);
  CHECK(harmonic(4) == q(25, 12));
  CHECK(harmonic(5) == q(137, 60));
  CHECK_THROWS_AS(harmonic(-1), std::domain_error);

  SECTION("table and binary splitting agree with plain summation") {
    for (std::int64_t n : {2, 17, 50, 1024, 1025, 1500}) CHECK(harmonic(n) == oracle::harmonic_by_summation(n));
  }
}

TEST_CASE("successive harmonic numbers differ by 1/n", "[core][harmonic][property]") {
  for (std::int64_t n = 1; n <= 300; ++n) {
    REQUIRE(harmonic(n) - harmonic(n - 1) == q(1, n));
    REQUIRE(harmonic(n) > harmonic(n - 1));
  }
}

TEST_CASE("log approximation error decreases toward Euler's constant", "[core][harmonic][property]") {
  double previous = harmonic_log_error(1);
  for (std::int64_t n = 2; n <= 5000; n += (n < 100 ? 1 : 97)) {
    const double e = harmonic_log_error(n);
    REQUIRE(e < previous);
    REQUIRE(e >= 0.5772);
    previous = e;
  }
}

TEST_CASE("generalized harmonic number", "[core][harmonic]") {
  CHECK(harmonic_general(1.0) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(harmonic_general(4.0) == Catch::Approx(25.0 / 12.0).epsilon(1e-12));
  // Large-x reference from the asymptotic expansion.
  const double big = harmonic_general(1e6);
  CHECK(std::abs(big - static_cast<double>(oracle::harmonic_asymptotic(1e6L))) < 1e-6);
  CHECK(std::abs(big - (std::log(1e6) + 0.5772157)) < 1e-6);
  // Non-integer points, reference values from a 30-digit digamma evaluation.
  CHECK(harmonic_general(0.5) == Catch::Approx(0.613705638880109381).epsilon(1e-13));
  CHECK(harmonic_general(31.6) == Catch::Approx(4.046112125151547402).epsilon(1e-13));
  CHECK_THROWS_AS(harmonic_general(0.0), std::domain_error);
  CHECK_THROWS_AS(harmonic_general(-2.0), std::domain_error);

  SECTION("matches the exact value at integers up to 10^4") {
    for (std::int64_t n : {1, 2, 10, 99, 500, 2048, 10000}) {
      const double exact = to_double(harmonic(n));
      REQUIRE(std::abs(harmonic_general(static_cast<double>(n)) - exact) <= 1e-12 * exact);
      REQUIRE(std::abs(harmonic_approx(n) - exact) <= 1e-12 * exact);
    }
  }
}

TEST_CASE("validate_params derives gamma and Gamma exactly", "[core][params]") {
  const auto p = validate_params(4, 8, q(1));
  CHECK(p.gamma == q(1, 8));
  CHECK(p.Gamma == q(1, 2));

  const auto cacheless = validate_params(4, 8, q(0));
  CHECK(cacheless.gamma == 0);
  CHECK(cacheless.Gamma == 0);

  CHECK_THROWS_WITH(validate_params(4, 3, q(1)), Catch::Matchers::ContainsSubstring("N < K"));
  CHECK_THROWS_AS(validate_params(1, 3, q(1)), ParameterError);
  CHECK_THROWS_AS(validate_params(4, 8, q(-1)), ParameterError);
  CHECK_THROWS_AS(validate_params(4, 8, q(9)), ParameterError);
  CHECK_THROWS_AS(validate_params(4, 8, q(1), 0), ParameterError);
  CHECK_NOTHROW(validate_params(4, 8, q(8), 96));
}

TEST_CASE("validate_params is idempotent", "[core][params][property]") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const std::int64_t K = 2 + static_cast<std::int64_t>(rng() % 40);
    const std::int64_t N = K + static_cast<std::int64_t>(rng() % 60);
    const std::int64_t den = 1 + static_cast<std::int64_t>(rng() % 7);
    const Rational M = q(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(N * den + 1)), den);
    const auto p = validate_params(K, N, M, 64);
    REQUIRE(validate_params(p.K, p.N, p.M, p.f) == p);
    REQUIRE(p.Gamma == Rational(K) * p.M / Rational(N));
    REQUIRE(p.gamma >= 0);
    REQUIRE(p.gamma <= 1);
  }
}
