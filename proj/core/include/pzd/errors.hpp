#pragma once

#include <stdexcept>
#include <string>

namespace pzd {

// Base class for all recoverable failures raised by the library. Callers that
// only need coarse handling can catch this; the concrete types below carry the
// precondition that was violated.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class NotCompleteError : public Error {
 public:
  explicit NotCompleteError(const std::string& what) : Error(what) {}
};

class NotGreatlyRegularError : public Error {
 public:
  explicit NotGreatlyRegularError(const std::string& what) : Error(what) {}
};

class NotAdmissibleError : public Error {
 public:
  explicit NotAdmissibleError(const std::string& what, int letter_index = -1)
      : Error(what), letter_index_(letter_index) {}
  // Index of the word letter whose product failed, -1 when not applicable.
  int letter_index() const { return letter_index_; }

 private:
  int letter_index_;
};

class BoundaryHitError : public Error {
 public:
  explicit BoundaryHitError(const std::string& what) : Error(what) {}
};

class DepthUnreachableError : public Error {
 public:
  explicit DepthUnreachableError(const std::string& what) : Error(what) {}
};

class DegenerateParameterError : public Error {
 public:
  explicit DegenerateParameterError(const std::string& what) : Error(what) {}
};

class PrecisionExhaustedError : public Error {
 public:
  explicit PrecisionExhaustedError(const std::string& what) : Error(what) {}
};

class BudgetExceededError : public Error {
 public:
  explicit BudgetExceededError(const std::string& what) : Error(what) {}
};

class HypothesisViolatedError : public Error {
 public:
  explicit HypothesisViolatedError(const std::string& what) : Error(what) {}
};

class DerivativeVanishesError : public Error {
 public:
  explicit DerivativeVanishesError(const std::string& what) : Error(what) {}
};

class SolveError : public Error {
 public:
  explicit SolveError(const std::string& what) : Error(what) {}
};

class NotInDomainError : public Error {
 public:
  explicit NotInDomainError(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

class OutOfRangeError : public Error {
 public:
  explicit OutOfRangeError(const std::string& what) : Error(what) {}
};

}  // namespace pzd
