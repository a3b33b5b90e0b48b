#include "readout_pem/prob.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "readout_pem/errors.hpp"

namespace readout_pem {

namespace {

// Largest register the dense 2^n representations are meant for.
constexpr int kMaxQubits = 24;

void require_same_shape(const ProbabilityDistribution& p,
                        const ProbabilityDistribution& q) {
  if (p.n_qubits() != q.n_qubits()) {
    throw DimensionError("distributions on " + std::to_string(p.n_qubits()) +
                         " and " + std::to_string(q.n_qubits()) + " qubits");
  }
}

int qubits_for_length(std::size_t length) {
  int n = 0;
  while ((std::size_t{1} << n) < length) ++n;
  if (n < 1 || (std::size_t{1} << n) != length) {
    throw DimensionError("vector length " + std::to_string(length) +
                         " is not a power of two >= 2");
  }
  return n;
}

}  // namespace

std::size_t state_count(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw ParameterError("qubit count out of range: " +
                         std::to_string(n_qubits));
  }
  return std::size_t{1} << n_qubits;
}

ProbabilityDistribution::ProbabilityDistribution(int n_qubits,
                                                 std::vector<double> values)
    : n_qubits_(n_qubits), values_(std::move(values)) {
  if (values_.size() != state_count(n_qubits_)) {
    throw ValidationError("distribution has " + std::to_string(values_.size()) +
                          " entries, expected 2^" + std::to_string(n_qubits_));
  }
  double total = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("distribution entry is negative or not finite");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kDistributionTolerance) {
    throw ValidationError("distribution sums to " + std::to_string(total));
  }
}

ProbabilityDistribution ProbabilityDistribution::one_hot(int n_qubits,
                                                         std::uint64_t index) {
  std::vector<double> values(state_count(n_qubits), 0.0);
  if (index >= values.size()) throw IndexError("one-hot index out of range");
  values[index] = 1.0;
  return {n_qubits, std::move(values)};
}

QubitMarginal marginalize(const ProbabilityDistribution& dist, int qubit) {
  const int n = dist.n_qubits();
  if (qubit < 0 || qubit >= n) {
    throw IndexError("qubit " + std::to_string(qubit) + " out of range for " +
                     std::to_string(n) + " qubits");
  }
  QubitMarginal m{0.0, 0.0};
  const auto values = dist.values();
  for (std::size_t j = 0; j < values.size(); ++j) {
    (qubit_bit(j, qubit, n) == 0 ? m.p0 : m.p1) += values[j];
  }
  return m;
}

double fidelity(const ProbabilityDistribution& p,
                const ProbabilityDistribution& q) {
  require_same_shape(p, q);
  double overlap = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) overlap += std::sqrt(p[j] * q[j]);
  // Rounding can push a self-overlap a hair above one.
  return std::min(1.0, overlap * overlap);
}

double mse(const ProbabilityDistribution& p, const ProbabilityDistribution& q) {
  require_same_shape(p, q);
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double d = p[j] - q[j];
    sum += d * d;
  }
  return sum / static_cast<double>(p.size() - 1);
}

double hellinger(const ProbabilityDistribution& p,
                 const ProbabilityDistribution& q) {
  require_same_shape(p, q);
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double d = std::sqrt(p[j]) - std::sqrt(q[j]);
    sum += d * d;
  }
  return std::min(1.0, std::sqrt(sum) / std::sqrt(2.0));
}

ProbabilityDistribution clamp_and_renormalize(std::span<const double> raw) {
  const int n = qubits_for_length(raw.size());
  std::vector<double> values(raw.begin(), raw.end());
  double total = 0.0;
  for (double& v : values) {
    if (!std::isfinite(v)) throw DegenerateVectorError("non-finite entry");
    if (v < 0.0) v = 0.0;
    total += v;
  }
  if (total <= 0.0) {
    throw DegenerateVectorError("no positive entry left after clamping");
  }
  for (double& v : values) v /= total;
  return {n, std::move(values)};
}

}  // namespace readout_pem
