#ifndef AUTOMORPH_ERROR_HPP
#define AUTOMORPH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace automorph {

/// Base class for every failure raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The map's derivative goes negative somewhere, so it is not a circle homeomorphism.
class NotHomeomorphism : public Error {
 public:
  using Error::Error;
};

/// An iterative routine ran out of its iteration or depth budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Floating point orbit data is too coarse for a requested combinatorial check.
class AccuracyFault : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition (bad grid size, rational target, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace automorph

#endif  // AUTOMORPH_ERROR_HPP
