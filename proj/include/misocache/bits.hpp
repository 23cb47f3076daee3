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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace misocache {

/// Fixed-length bit string packed LSB-first into 64-bit words. Bits past
/// size() in the last word are always zero, so defaulted equality is exact.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t size) : words_((size + 63) / 64, 0), size_(size) {}

  static BitString from_words(std::vector<std::uint64_t> words, std::size_t size) {
    if (words.size() != (size + 63) / 64) throw std::invalid_argument("word count does not match bit size");
    BitString b;
    b.words_ = std::move(words);
    b.size_ = size;
    b.clear_tail();
    return b;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const std::vector<std::uint64_t>& words() const { return words_; }

  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }

  void set(std::size_t i, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (value) {
      words_[i / 64] |= mask;
    } else {
      words_[i / 64] &= ~mask;
    }
  }

  BitString slice(std::size_t offset, std::size_t length) const {
    if (offset > size_ || length > size_ - offset) throw std::out_of_range("bit slice out of range");
    BitString out(length);
    for (std::size_t i = 0; i < length; ++i)
      if (test(offset + i)) out.set(i, true);
    return out;
  }

  void append(const BitString& other) {
    const std::size_t base = size_;
    resize(size_ + other.size_);
    for (std::size_t i = 0; i < other.size_; ++i)
      if (other.test(i)) set(base + i, true);
  }

  BitString& operator^=(const BitString& other) {
    if (other.size_ != size_) throw std::invalid_argument("XOR of bit strings with different lengths");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
  }

  friend BitString operator^(BitString a, const BitString& b) {
    a ^= b;
    return a;
  }

  bool operator==(const BitString&) const = default;

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  /// Lowercase hex of the packed words, least significant word first.
  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    const std::size_t nibbles = (size_ + 3) / 4;
    out.reserve(nibbles);
    for (std::size_t i = 0; i < nibbles; ++i) {
      const std::uint64_t w = words_[(i * 4) / 64];
      out.push_back(kDigits[(w >> ((i * 4) % 64)) & 0xf]);
    }
    return out;
  }

 private:
  void resize(std::size_t size) {
    words_.resize((size + 63) / 64, 0);
    size_ = size;
  }

  void clear_tail() {
    if (size_ % 64 != 0) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

}  // namespace misocache
