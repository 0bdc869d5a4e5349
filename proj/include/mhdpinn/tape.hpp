#pragma once

#include <cstdint>
#include <vector>

namespace mhdpinn {

class Tape;

/// Scalar recorded on a Tape. A TapeVar without a tape is a constant and
/// contributes nothing to the reverse sweep.
class TapeVar {
 public:
  TapeVar() = default;
  TapeVar(double constant) : value_(constant) {}  // NOLINT: implicit by intent

  double value() const { return value_; }
  bool is_constant() const { return tape_ == nullptr; }
  std::int32_t index() const { return index_; }
  Tape* tape() const { return tape_; }

  TapeVar operator-() const;
  TapeVar& operator+=(const TapeVar& o) { return *this = *this + o; }
  TapeVar& operator-=(const TapeVar& o) { return *this = *this - o; }
  TapeVar& operator*=(const TapeVar& o) { return *this = *this * o; }

  friend TapeVar operator+(const TapeVar& a, const TapeVar& b);
  friend TapeVar operator-(const TapeVar& a, const TapeVar& b);
  friend TapeVar operator*(const TapeVar& a, const TapeVar& b);
  friend TapeVar operator/(const TapeVar& a, const TapeVar& b);

 private:
  friend class Tape;
  TapeVar(Tape* tape, std::int32_t index, double value)
      : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  std::int32_t index_ = -1;
  double value_ = 0.0;
};

/// Linear record of elementary operations with at most two parents each.
/// Not thread-safe; use one tape per worker.
class Tape {
 public:
  TapeVar variable(double value);

  /// Records `value` with local partials wrt up to two parents. A parent that
  /// is a constant is dropped.
  TapeVar record(double value, const TapeVar& a, double da, const TapeVar& b, double db);
  TapeVar record(double value, const TapeVar& a, double da);

  /// Seeds d(output)/d(output) = 1 and sweeps backwards.
  void backward(const TapeVar& output);

  /// Adjoint after backward(); 0 for constants.
  double adjoint(const TapeVar& v) const;

  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  struct Node {
    std::int32_t lhs;
    std::int32_t rhs;
    double d_lhs;
    double d_rhs;
  };
  std::vector<Node> nodes_;
  std::vector<double> adjoints_;
};

}  // namespace mhdpinn
