#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hardy {

// Base of every error thrown by the library. `kind()` is a stable
// machine-readable tag used in CLI error reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what);
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension", what) {}
};

class TruncationError : public Error {
 public:
  explicit TruncationError(const std::string& what) : Error("truncation", what) {}
};

class NotLeftInvertibleError : public Error {
 public:
  explicit NotLeftInvertibleError(const std::string& what)
      : Error("not-left-invertible", what) {}
};

class InvalidKernelError : public Error {
 public:
  explicit InvalidKernelError(const std::string& what) : Error("invalid-kernel", what) {}
};

class InvalidInnerFunctionError : public Error {
 public:
  explicit InvalidInnerFunctionError(const std::string& what)
      : Error("invalid-inner-function", what) {}
};

class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& what) : Error("evaluation", what) {}
};

class DivisibilityError : public Error {
 public:
  explicit DivisibilityError(const std::string& what) : Error("divisibility", what) {}
};

class IllConditionedDivisionError : public Error {
 public:
  explicit IllConditionedDivisionError(const std::string& what)
      : Error("ill-conditioned-division", what) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what) : Error("unsupported", what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error("precondition", what) {}
};

class ModelInconsistencyError : public Error {
 public:
  explicit ModelInconsistencyError(const std::string& what)
      : Error("model-inconsistency", what) {}
};

class ExtractionError : public Error {
 public:
  explicit ExtractionError(const std::string& what) : Error("extraction", what) {}
};

class InternalConsistencyError : public Error {
 public:
  explicit InternalConsistencyError(const std::string& what)
      : Error("internal-consistency", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// Raised by strict construction of an n-perturbation; carries the failing
// clauses ("i", "ii", "iii") of the definition.
class DefinitionViolationError : public Error {
 public:
  DefinitionViolationError(std::vector<std::string> clauses, const std::string& what);
  const std::vector<std::string>& clauses() const noexcept { return clauses_; }

 private:
  std::vector<std::string> clauses_;
};

}  // namespace hardy
