#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "mhdpinn/jet.hpp"

namespace mhdpinn {

inline constexpr std::size_t kNumFields = 8;

/// MHD primitive variables in storage order.
enum class Field : std::size_t { rho = 0, vx, vy, vz, p, bx, by, bz };

inline constexpr std::array<std::string_view, kNumFields> kFieldNames = {
    "rho", "vx", "vy", "vz", "P", "Bx", "By", "Bz"};

template <class V>
struct FieldArray {
  std::array<V, kNumFields> data{};

  V& operator[](Field f) { return data[static_cast<std::size_t>(f)]; }
  const V& operator[](Field f) const { return data[static_cast<std::size_t>(f)]; }
  V& operator[](std::size_t i) { return data[i]; }
  const V& operator[](std::size_t i) const { return data[i]; }

  friend bool operator==(const FieldArray&, const FieldArray&) = default;
};

using PrimitiveState = FieldArray<double>;

template <class T>
using BasicStateJet = FieldArray<Jet<T>>;
using StateJet = BasicStateJet<double>;

inline PrimitiveState values_of(const StateJet& s) {
  PrimitiveState out;
  for (std::size_t i = 0; i < kNumFields; ++i) out[i] = s[i].value;
  return out;
}

/// A space-time location.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

}  // namespace mhdpinn
