#pragma once

// Little-endian binary primitives shared by the cube and reducer containers.

#include "hsdr/core.hpp"

#include <cstring>
#include <istream>
#include <ostream>

namespace hsdr::detail {

inline void put_u16(std::ostream& out, std::uint16_t v) {
  const unsigned char bytes[2] = {static_cast<unsigned char>(v & 0xff),
                                  static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(bytes), 2);
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char bytes[4];
  for (int i = 0; i < 4; ++i)
    bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i)
    bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

inline void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

inline void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

inline bool get_bytes(std::istream& in, unsigned char* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

inline bool get_u16(std::istream& in, std::uint16_t& v) {
  unsigned char b[2];
  if (!get_bytes(in, b, 2)) return false;
  v = static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  return true;
}

inline bool get_u32(std::istream& in, std::uint32_t& v) {
  unsigned char b[4];
  if (!get_bytes(in, b, 4)) return false;
  v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
      (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

inline bool get_u64(std::istream& in, std::uint64_t& v) {
  unsigned char b[8];
  if (!get_bytes(in, b, 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return true;
}

inline bool get_f32(std::istream& in, float& v) {
  std::uint32_t bits;
  if (!get_u32(in, bits)) return false;
  std::memcpy(&v, &bits, 4);
  return true;
}

inline bool get_f64(std::istream& in, double& v) {
  std::uint64_t bits;
  if (!get_u64(in, bits)) return false;
  std::memcpy(&v, &bits, 8);
  return true;
}

}  // namespace hsdr::detail
