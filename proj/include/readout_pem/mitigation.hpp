#pragma once

#include <span>
#include <vector>

#include "readout_pem/confusion.hpp"
#include "readout_pem/dense_matrix.hpp"
#include "readout_pem/noise.hpp"
#include "readout_pem/prob.hpp"

namespace readout_pem {

/// Full 2^n x 2^n readout error matrix, rows indexed by the prepared state
/// and columns by the measured state. Row-stochastic, nonnegative and
/// diagonally dominant.
class ErrorMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-8;

  /// Throws ValidationError when an invariant fails.
  ErrorMatrix(int n_qubits, DenseMatrix entries);

  int n_qubits() const noexcept { return n_qubits_; }
  const DenseMatrix& entries() const noexcept { return entries_; }

  friend bool operator==(const ErrorMatrix&, const ErrorMatrix&) = default;

 private:
  int n_qubits_;
  DenseMatrix entries_;
};

/// Inverse of an ErrorMatrix. Only produced by invert_error_matrix (or by
/// deserialization, which re-checks the residual against its source).
class MitigationMatrix {
 public:
  static constexpr double kResidualTolerance = 1e-8;

  int n_qubits() const noexcept { return n_qubits_; }
  const DenseMatrix& entries() const noexcept { return entries_; }
  /// ||E * E^-1 - I||_inf measured at construction.
  double residual() const noexcept { return residual_; }

  /// Wraps a precomputed inverse after checking it against `source`.
  static MitigationMatrix from_inverse(const ErrorMatrix& source, DenseMatrix inverse);

 private:
  MitigationMatrix(int n_qubits, DenseMatrix entries, double residual)
      : n_qubits_(n_qubits), entries_(std::move(entries)), residual_(residual) {}

  int n_qubits_;
  DenseMatrix entries_;
  double residual_;
};

/// Per-qubit confusions from the all-zeros and all-ones calibration runs.
/// Throws CalibrationQualityError when any flip rate reaches 0.5.
std::vector<ConfusionMatrix> estimate_confusions(const ShotResult& zeros_result,
                                                 const ShotResult& ones_result);

/// Same estimate from exact (unsampled) calibration distributions.
std::vector<ConfusionMatrix> estimate_confusions(const ProbabilityDistribution& zeros,
                                                 const ProbabilityDistribution& ones);

/// Entry (k, j) = prod_i Q_i(bit_i(k), bit_i(j)), i.e. Q_0 (x) ... (x) Q_{n-1}.
ErrorMatrix assemble_error_matrix(std::span<const ConfusionMatrix> confusions);

/// LU with partial pivoting, one solve per unit column.
MitigationMatrix invert_error_matrix(const ErrorMatrix& em);

/// E_m^T * measured, followed by clamp_and_renormalize.
ProbabilityDistribution mitigate(const ProbabilityDistribution& measured,
                                 const MitigationMatrix& mm);

}  // namespace readout_pem
