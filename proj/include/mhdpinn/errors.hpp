#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mhdpinn {

/// Arithmetic outside a function's domain (e.g. jet division by zero).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller broke an operation's precondition (empty batch, bad config...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values surfaced during training; carries the epoch (-1 when
/// raised outside the training loop).
class TrainingFault : public std::runtime_error {
 public:
  TrainingFault(const std::string& what, long epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  long epoch() const noexcept { return epoch_; }

 private:
  long epoch_;
};

/// The density baseline asked for more points than the configured cap.
class ScalingLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid MHDC cube file.
class CubeLoadError : public std::runtime_error {
 public:
  CubeLoadError(const std::string& what, std::size_t offending_index)
      : std::runtime_error(what), index_(offending_index) {}
  std::size_t offending_index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Unreadable or inconsistent file other than a cube (checkpoint, CSV, config).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mhdpinn
