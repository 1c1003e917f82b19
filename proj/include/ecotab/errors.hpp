#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecotab {

// Malformed literals, inconsistent margins, bad dimensions.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An enumeration or permutation budget was exceeded.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, std::size_t partial_count)
      : std::runtime_error(what), partial_count_(partial_count) {}

  // Number of items produced before the budget was hit.
  std::size_t partial_count() const noexcept { return partial_count_; }

 private:
  std::size_t partial_count_;
};

// The model is not identified from the data: too few units, rank-deficient
// design, or singular information matrix.
class IdentificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative procedure failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ecotab
