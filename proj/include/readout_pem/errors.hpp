#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace readout_pem {

// Validation problems (bad input, bad config) map to CLI exit code 1;
// numerical/model failures map to exit code 2.
enum class ErrorCategory { validation, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define READOUT_PEM_DEFINE_ERROR(Name, Category)                          \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(Category, what) {}     \
  };

READOUT_PEM_DEFINE_ERROR(ValidationError, ErrorCategory::validation)
READOUT_PEM_DEFINE_ERROR(IndexError, ErrorCategory::validation)
READOUT_PEM_DEFINE_ERROR(DimensionError, ErrorCategory::validation)
READOUT_PEM_DEFINE_ERROR(ParameterError, ErrorCategory::validation)
READOUT_PEM_DEFINE_ERROR(CircuitError, ErrorCategory::validation)
READOUT_PEM_DEFINE_ERROR(DatasetError, ErrorCategory::validation)
READOUT_PEM_DEFINE_ERROR(DegenerateVectorError, ErrorCategory::numerical)
READOUT_PEM_DEFINE_ERROR(CalibrationQualityError, ErrorCategory::numerical)
READOUT_PEM_DEFINE_ERROR(SingularMatrixError, ErrorCategory::numerical)
READOUT_PEM_DEFINE_ERROR(DegenerateDesignError, ErrorCategory::numerical)

#undef READOUT_PEM_DEFINE_ERROR

/// Raised when the blended confusion matrix of one qubit loses diagonal
/// dominance. Carries the offending qubit once known.
class PersonalizationError : public Error {
 public:
  explicit PersonalizationError(const std::string& what, long qubit = -1)
      : Error(ErrorCategory::numerical, what), qubit_(qubit) {}

  long qubit() const noexcept { return qubit_; }

 private:
  long qubit_;
};

}  // namespace readout_pem
