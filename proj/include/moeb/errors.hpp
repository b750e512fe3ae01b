#pragma once

#include <stdexcept>
#include <string>

namespace moeb {

// Base class for every error raised by the library. Callers that only need
// to distinguish "bad input" from "broken invariant" can catch the two
// intermediate classes below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: the caller asked for something the library cannot do.
class UsageError : public Error {
 public:
  using Error::Error;
};

class SizingError : public UsageError {
 public:
  using UsageError::UsageError;
};

class DomainError : public UsageError {
 public:
  using UsageError::UsageError;
};

class ParameterError : public UsageError {
 public:
  using UsageError::UsageError;
};

class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

// Working precision ran out before a strict inequality could be certified.
class PrecisionError : public UsageError {
 public:
  using UsageError::UsageError;
};

// e(m*alpha) == 1 for a frequency that has to be divided by e(m*alpha) - 1.
class ResonanceError : public UsageError {
 public:
  using UsageError::UsageError;
};

class ConjugacyError : public UsageError {
 public:
  using UsageError::UsageError;
};

// A mathematical invariant failed at runtime. This signals a bug (or a
// theorem whose hypotheses were not met), not bad input.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace moeb
