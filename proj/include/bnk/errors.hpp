#pragma once

#include <stdexcept>
#include <string>

namespace bnk {

// Parameter value outside the region where a formula is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A denominator or matrix that must be invertible is (numerically) singular.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rational-expectations system without a unique stable solution.
class DeterminacyError : public std::runtime_error {
 public:
  DeterminacyError(const std::string& what, int n_unstable, int n_forward)
      : std::runtime_error(what), n_unstable_(n_unstable), n_forward_(n_forward) {}

  int unstable_roots() const { return n_unstable_; }
  int forward_variables() const { return n_forward_; }
  bool indeterminate() const { return n_unstable_ < n_forward_; }

 private:
  int n_unstable_;
  int n_forward_;
};

// Malformed input files or configuration.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bnk
