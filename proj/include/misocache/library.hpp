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

#include "misocache/bits.hpp"
#include "misocache/params.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace misocache {

/// N files of f pseudorandom bits each.
///
/// Bits come from std::mt19937_64 seeded with `seed`. Files are produced in
/// index order; each file consumes ceil(f / 64) engine outputs, every output
/// filling the next 64 bits least-significant bit first. Unused high bits of
/// a file's last output are dropped. The engine is fully specified by the
/// C++ standard (its 10000th output from the default seed is
/// 9981545732273789042), so libraries are reproducible on any platform.
struct Library {
  std::uint64_t seed = 0;
  std::int64_t file_bits = 0;
  std::vector<BitString> files;

  const BitString& file(std::int64_t n) const { return files.at(static_cast<std::size_t>(n)); }
};

inline Library generate_library(const SystemParams& p, std::uint64_t seed) {
  if (!p.f) throw ParameterError("generate_library needs a file size f");
  const auto bits = static_cast<std::size_t>(*p.f);
  std::mt19937_64 engine(seed);
  Library lib;
  lib.seed = seed;
  lib.file_bits = *p.f;
  lib.files.reserve(static_cast<std::size_t>(p.N));
  for (std::int64_t n = 0; n < p.N; ++n) {
    std::vector<std::uint64_t> words((bits + 63) / 64);
    for (auto& w : words) w = engine();
    lib.files.push_back(BitString::from_words(std::move(words), bits));
  }
  return lib;
}

}  // namespace misocache
