#pragma once

#include <stdexcept>
#include <string>

namespace fdforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidDimensions : public Error {
public:
  using Error::Error;
};

class InvalidSeed : public Error {
public:
  using Error::Error;
};

/// The transposed Taylor matrix has rank below k.
class RankDeficient : public Error {
public:
  using Error::Error;
};

/// RREF pivots are not in the leading k columns, so the [I, B] block form does not hold.
class PivotDisplacement : public Error {
public:
  using Error::Error;
};

/// Null vector has a (numerically) zero first entry and cannot be normalized.
class NonNormalizableSeed : public Error {
public:
  using Error::Error;
};

/// Zero leading coefficient or degree zero.
class DegenerateInput : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

}  // namespace fdforge
