#ifndef GFLOW_ERRORS_HPP
#define GFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gflow {

/// Input violates a documented precondition (bad surface, bad parameters).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method (shooting, eigen-iteration, backtracking) did not
/// reach its stopping criterion.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical property required by an operation failed to hold.
class PropertyFailure : public std::runtime_error {
 public:
  PropertyFailure(int property, const std::string& what)
      : std::runtime_error(what), property_(property) {}
  int property() const noexcept { return property_; }

 private:
  int property_;
};

}  // namespace gflow

#endif  // GFLOW_ERRORS_HPP
