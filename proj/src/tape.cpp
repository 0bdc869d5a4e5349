#include "mhdpinn/tape.hpp"

#include <stdexcept>

namespace mhdpinn {

namespace {

Tape* common_tape(const TapeVar& a, const TapeVar& b) {
  if (a.tape() && b.tape() && a.tape() != b.tape()) {
    throw std::logic_error("mixing variables from different tapes");
  }
  return a.tape() ? a.tape() : b.tape();
}

}  // namespace

TapeVar TapeVar::operator-() const {
  if (!tape_) return TapeVar(-value_);
  return tape_->record(-value_, *this, -1.0);
}

TapeVar operator+(const TapeVar& a, const TapeVar& b) {
  Tape* tape = common_tape(a, b);
  const double v = a.value_ + b.value_;
  if (!tape) return TapeVar(v);
  return tape->record(v, a, 1.0, b, 1.0);
}

TapeVar operator-(const TapeVar& a, const TapeVar& b) {
  Tape* tape = common_tape(a, b);
  const double v = a.value_ - b.value_;
  if (!tape) return TapeVar(v);
  return tape->record(v, a, 1.0, b, -1.0);
}

TapeVar operator*(const TapeVar& a, const TapeVar& b) {
  Tape* tape = common_tape(a, b);
  const double v = a.value_ * b.value_;
  if (!tape) return TapeVar(v);
  return tape->record(v, a, b.value_, b, a.value_);
}

TapeVar operator/(const TapeVar& a, const TapeVar& b) {
  Tape* tape = common_tape(a, b);
  const double v = a.value_ / b.value_;
  if (!tape) return TapeVar(v);
  return tape->record(v, a, 1.0 / b.value_, b, -v / b.value_);
}

TapeVar Tape::variable(double value) {
  nodes_.push_back({-1, -1, 0.0, 0.0});
  return TapeVar(this, static_cast<std::int32_t>(nodes_.size() - 1), value);
}

TapeVar Tape::record(double value, const TapeVar& a, double da, const TapeVar& b, double db) {
  Node n{-1, -1, 0.0, 0.0};
  if (!a.is_constant()) n.lhs = a.index(), n.d_lhs = da;
  if (!b.is_constant()) n.rhs = b.index(), n.d_rhs = db;
  nodes_.push_back(n);
  return TapeVar(this, static_cast<std::int32_t>(nodes_.size() - 1), value);
}

TapeVar Tape::record(double value, const TapeVar& a, double da) {
  return record(value, a, da, TapeVar{}, 0.0);
}

void Tape::backward(const TapeVar& output) {
  adjoints_.assign(nodes_.size(), 0.0);
  if (output.is_constant()) return;
  if (output.tape() != this) throw std::logic_error("output recorded on another tape");
  adjoints_[output.index()] = 1.0;
  for (std::int32_t i = output.index(); i >= 0; --i) {
    const double a = adjoints_[i];
    if (a == 0.0) continue;
    const Node& n = nodes_[i];
    if (n.lhs >= 0) adjoints_[n.lhs] += a * n.d_lhs;
    if (n.rhs >= 0) adjoints_[n.rhs] += a * n.d_rhs;
  }
}

double Tape::adjoint(const TapeVar& v) const {
  if (v.is_constant() || v.index() >= static_cast<std::int32_t>(adjoints_.size())) return 0.0;
  return adjoints_[v.index()];
}

void Tape::clear() {
  nodes_.clear();
  adjoints_.clear();
}

}  // namespace mhdpinn
