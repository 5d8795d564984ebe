#pragma once

// Little-endian primitives shared by the on-disk formats.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>

#include "folio/error.hpp"

namespace folio::detail {

inline void put_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

inline void put_f32_array(std::ostream& out, std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
}

inline void put_string16(std::ostream& out, const std::string& s) {
  if (s.size() > 0xffff) {
    throw Error(ErrorCode::kValidation, "string longer than 65535 bytes");
  }
  put_u16(out, static_cast<std::uint16_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

// Bounded reader: every read checks the declared remaining length first so
// short inputs surface as truncation rather than stream failure.
class BoundedReader {
 public:
  BoundedReader(std::istream& in, std::uint64_t length)
      : in_(in), remaining_(length) {}

  std::uint64_t remaining() const noexcept { return remaining_; }
  bool has(std::uint64_t n) const noexcept { return remaining_ >= n; }

  void read_bytes(char* dst, std::uint64_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::uint64_t>(in_.gcount()) != n) {
      throw Error(ErrorCode::kIo, "short read from input stream");
    }
    remaining_ -= n;
  }

  std::uint16_t u16() {
    unsigned char b[2];
    read_bytes(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }

  std::uint32_t u32() {
    unsigned char b[4];
    read_bytes(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }

  void f32_array(std::span<float> dst) {
    read_bytes(reinterpret_cast<char*>(dst.data()), dst.size_bytes());
    if constexpr (std::endian::native != std::endian::little) {
      for (float& f : dst) {
        auto bits = std::bit_cast<std::uint32_t>(f);
        bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) |
               ((bits >> 8) & 0xff00u) | (bits >> 24);
        f = std::bit_cast<float>(bits);
      }
    }
  }

 private:
  std::istream& in_;
  std::uint64_t remaining_;
};

}  // namespace folio::detail
