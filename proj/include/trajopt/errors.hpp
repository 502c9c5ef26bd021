#pragma once

#include <stdexcept>
#include <string>

namespace trajopt {

// Base for every error raised by the library. Callers that only care about
// "planning failed" can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

// The 14x14 interpolation system could not be solved to tolerance.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

// A chaotic map was seeded on (or collapsed onto) a fixed point.
class BadSeedState : public Error {
 public:
  using Error::Error;
};

class DegenerateAlpha : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class NoFeasibleSolution : public Error {
 public:
  using Error::Error;
};

class InfeasibleAfterSync : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace trajopt
