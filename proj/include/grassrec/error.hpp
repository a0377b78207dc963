#pragma once

#include <stdexcept>
#include <string>

namespace grassrec {

// Base for every error the library raises. Callers that only need a message
// catch this; the subclasses exist for callers that branch on the cause.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Requested moment degree has no closed form in this library (t > 3 for a
// general spectrum).
class UnsupportedDegree : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// construct_cubature could not reach the requested residual.
class CubatureError : public Error {
 public:
  CubatureError(const std::string& what, double achieved)
      : Error(what), achieved_residual(achieved) {}
  double achieved_residual;
};

// A golfing stage ran out of batch redraws.
class GolfingError : public Error {
 public:
  GolfingError(const std::string& what, int stage, int repeats)
      : Error(what), stage(stage), repeats(repeats) {}
  int stage;
  int repeats;
};

}  // namespace grassrec
