#pragma once

#include <stdexcept>

namespace modfun {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two values live in different cyclotomic fields and were combined without an
// explicit embedding.
struct LevelMismatchError : Error {
  using Error::Error;
};

struct DivisionByZeroError : Error {
  using Error::Error;
};

// An argument is outside the operation's domain (non-coprime Galois exponent,
// ramified prime, malformed index, ...).
struct DomainError : Error {
  using Error::Error;
};

// An operation required an algebraic integer but found a denominator.
struct IntegralityError : Error {
  using Error::Error;
};

// A certified window or a Hensel lift is too small for the requested answer.
struct PrecisionError : Error {
  using Error::Error;
};

// A congruence was requested outside the residue hypothesis it needs.
struct HypothesisError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace modfun
