#pragma once

#include <stdexcept>
#include <string>

namespace conicvol {

// Base for every error raised by the library. Subclasses map onto the CLI's
// exit-code classes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-domain input (bad orders, b <= 0, wrong band sign for a
// model kind, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A conic order outside (-1, 0]. Positive orders are reported separately from
// other invalid input.
class InvalidOrder : public InvalidInput {
 public:
  explicit InvalidOrder(double order, const std::string& what)
      : InvalidInput(what), order_(order) {}
  double order() const noexcept { return order_; }

 private:
  double order_;
};

// Inputs are well formed but geometrically impossible: pinching violated,
// gluing mass outside the football cap, hyperbolic chart not reached.
class Infeasible : public Error {
 public:
  using Error::Error;
};

// A numerical post-condition failed beyond its tolerance. Indicates an
// internal inconsistency rather than a user error.
class ToleranceFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace conicvol
