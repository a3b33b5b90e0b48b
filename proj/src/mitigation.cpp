#include "readout_pem/mitigation.hpp"

#include <cmath>
#include <string>

#include "readout_pem/errors.hpp"

namespace readout_pem {

namespace {

double identity_residual(const DenseMatrix& e, const DenseMatrix& inverse) {
  DenseMatrix r = e * inverse;
  for (std::size_t i = 0; i < r.rows(); ++i) r(i, i) -= 1.0;
  return infinity_norm(r);
}

ConfusionMatrix confusion_from_flips(int qubit, double flip01, double flip10) {
  if (flip01 >= 0.5 || flip10 >= 0.5) {
    throw CalibrationQualityError(
        "qubit " + std::to_string(qubit) + " flip rate " +
        std::to_string(std::max(flip01, flip10)) +
        " >= 0.5; calibration is not diagonally dominant");
  }
  return ConfusionMatrix::from_flip_rates(flip01, flip10);
}

}  // namespace

ErrorMatrix::ErrorMatrix(int n_qubits, DenseMatrix entries)
    : n_qubits_(n_qubits), entries_(std::move(entries)) {
  const std::size_t dim = state_count(n_qubits_);
  if (entries_.rows() != dim || entries_.cols() != dim) {
    throw DimensionError("error matrix must be 2^n x 2^n");
  }
  for (std::size_t k = 0; k < dim; ++k) {
    double sum = 0.0;
    const double diag = entries_(k, k);
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = entries_(k, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError("error matrix entry is negative or not finite");
      }
      if (j != k && !(diag > v)) {
        throw ValidationError("error matrix row " + std::to_string(k) +
                              " is not diagonally dominant");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ValidationError("error matrix row " + std::to_string(k) +
                            " does not sum to one");
    }
  }
}

MitigationMatrix MitigationMatrix::from_inverse(const ErrorMatrix& source,
                                                DenseMatrix inverse) {
  const double residual = identity_residual(source.entries(), inverse);
  if (!(residual < kResidualTolerance)) {
    throw SingularMatrixError("inverse residual " + std::to_string(residual) +
                              " exceeds tolerance");
  }
  return MitigationMatrix(source.n_qubits(), std::move(inverse), residual);
}

std::vector<ConfusionMatrix> estimate_confusions(const ShotResult& zeros_result,
                                                 const ShotResult& ones_result) {
  zeros_result.validate();
  ones_result.validate();
  const int n = zeros_result.n_qubits;
  if (ones_result.n_qubits != n) {
    throw DimensionError("calibration runs disagree on qubit count");
  }
  std::vector<ConfusionMatrix> out;
  out.reserve(n);
  for (int q = 0; q < n; ++q) {
    std::uint64_t read1_after0 = 0, read0_after1 = 0;
    for (std::size_t j = 0; j < zeros_result.counts.size(); ++j) {
      if (qubit_bit(j, q, n) == 1) read1_after0 += zeros_result.counts[j];
      else read0_after1 += ones_result.counts[j];
    }
    out.push_back(confusion_from_flips(
        q, static_cast<double>(read1_after0) / static_cast<double>(zeros_result.shots),
        static_cast<double>(read0_after1) / static_cast<double>(ones_result.shots)));
  }
  return out;
}

std::vector<ConfusionMatrix> estimate_confusions(const ProbabilityDistribution& zeros,
                                                 const ProbabilityDistribution& ones) {
  if (zeros.n_qubits() != ones.n_qubits()) {
    throw DimensionError("calibration runs disagree on qubit count");
  }
  std::vector<ConfusionMatrix> out;
  for (int q = 0; q < zeros.n_qubits(); ++q) {
    out.push_back(confusion_from_flips(q, marginalize(zeros, q).p1,
                                       marginalize(ones, q).p0));
  }
  return out;
}

ErrorMatrix assemble_error_matrix(std::span<const ConfusionMatrix> confusions) {
  if (confusions.empty()) throw ParameterError("no confusion matrices given");
  const int n = static_cast<int>(confusions.size());
  const std::size_t dim = state_count(n);
  DenseMatrix e(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t j = 0; j < dim; ++j) {
      double product = 1.0;
      for (int i = 0; i < n; ++i) {
        product *= confusions[i](qubit_bit(k, i, n), qubit_bit(j, i, n));
      }
      e(k, j) = product;
    }
  }
  return ErrorMatrix(n, std::move(e));
}

MitigationMatrix invert_error_matrix(const ErrorMatrix& em) {
  const LuFactorization lu(em.entries());
  return MitigationMatrix::from_inverse(em, lu.inverse());
}

ProbabilityDistribution mitigate(const ProbabilityDistribution& measured,
                                 const MitigationMatrix& mm) {
  if (measured.n_qubits() != mm.n_qubits()) {
    throw DimensionError("measured distribution and mitigation matrix disagree");
  }
  const auto raw = mm.entries().transpose_times(measured.values());
  return clamp_and_renormalize(raw);
}

}  // namespace readout_pem
