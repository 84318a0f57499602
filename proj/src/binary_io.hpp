// Copyright 2026 The ugcrank Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Little-endian encode/decode helpers independent of host byte order.

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "ugcrank/error.hpp"

namespace ugcrank::binary {

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f32(std::string& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(out, bits);
}

inline void put_f64(std::string& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(out, bits);
}

// Bounds-checked reader; every overrun throws ParseError naming the field.
class Reader {
 public:
  Reader(std::string_view data, std::string source) : data_(data), source_(std::move(source)) {}

  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }

  std::string_view bytes(std::size_t n, const char* what) {
    if (remaining() < n) {
      throw ParseError(0, source_ + ": truncated while reading " + what + " at byte " + std::to_string(pos_));
    }
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint64_t uint(int width, const char* what) {
    const auto b = bytes(static_cast<std::size_t>(width), what);
    std::uint64_t v = 0;
    for (int i = width - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return v;
  }
  std::uint16_t u16(const char* what) { return static_cast<std::uint16_t>(uint(2, what)); }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(uint(4, what)); }
  std::uint64_t u64(const char* what) { return uint(8, what); }

  float f32(const char* what) {
    const auto bits = u32(what);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
  double f64(const char* what) {
    const auto bits = u64(what);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }

 private:
  std::string_view data_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace ugcrank::binary
