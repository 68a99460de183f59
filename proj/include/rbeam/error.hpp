#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rbeam {

/// A parameter or argument outside its admissible range.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(const std::string& what, std::size_t expected, std::size_t got)
      : std::invalid_argument(what + ": expected dimension " + std::to_string(expected) +
                              ", got " + std::to_string(got)) {}
};

/// NaN/Inf in the state, or a singular system matrix.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, long step_index = -1)
      : std::runtime_error(step_index >= 0 ? what + " (step " + std::to_string(step_index) + ")"
                                           : what),
        step_index_(step_index) {}

  long step_index() const noexcept { return step_index_; }

 private:
  long step_index_;
};

}  // namespace rbeam
