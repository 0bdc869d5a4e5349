#pragma once

// Little-endian primitive encoding shared by the cube and checkpoint formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace mhdpinn::detail {

template <class U>
U byteswap_if_big(U v) {
  if constexpr (std::endian::native == std::endian::big) {
    U out = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out = static_cast<U>((out << 8) | ((v >> (8 * i)) & 0xff));
    }
    return out;
  } else {
    return v;
  }
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
  v = byteswap_if_big(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline void put_u64(std::ostream& os, std::uint64_t v) {
  v = byteswap_if_big(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
inline void put_string(std::ostream& os, const std::string& s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline bool get_u32(std::istream& is, std::uint32_t& v) {
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) return false;
  v = byteswap_if_big(v);
  return true;
}
inline bool get_u64(std::istream& is, std::uint64_t& v) {
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) return false;
  v = byteswap_if_big(v);
  return true;
}
inline bool get_f64(std::istream& is, double& v) {
  std::uint64_t bits = 0;
  if (!get_u64(is, bits)) return false;
  v = std::bit_cast<double>(bits);
  return true;
}

}  // namespace mhdpinn::detail
