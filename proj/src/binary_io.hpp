// Copyright 2026 The vfqp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>

#include "vfqp/types.hpp"

namespace vfqp::binio {

// Little-endian writer/reader over an in-memory byte string.

template <typename T>
T byteswap_if_needed(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    out_.append(static_cast<const char*>(p), n);
  }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put(bits);
  }
  template <typename Vec>
  void f64s(const Vec& v) {
    for (int i = 0; i < static_cast<int>(v.size()); ++i) f64(v[i]);
  }
  std::string& str() { return out_; }

 private:
  template <typename T>
  void put(T v) {
    v = byteswap_if_needed(v);
    bytes(&v, sizeof(T));
  }
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& in, ErrorCode truncated_code, std::string what)
      : in_(in), code_(truncated_code), what_(std::move(what)) {}

  void bytes(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  double f64() {
    const std::uint64_t bits = get<std::uint64_t>();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  template <typename Vec>
  void f64s(Vec& v) {
    for (int i = 0; i < static_cast<int>(v.size()); ++i) v[i] = f64();
  }
  std::string text(std::size_t n) {
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n)
      throw Error(code_, what_ + ": unexpected end of data");
  }
  template <typename T>
  T get() {
    T v;
    bytes(&v, sizeof(T));
    return byteswap_if_needed(v);
  }

  const std::string& in_;
  std::size_t pos_ = 0;
  ErrorCode code_;
  std::string what_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

}  // namespace vfqp::binio
