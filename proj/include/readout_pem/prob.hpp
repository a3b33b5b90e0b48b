#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace readout_pem {

inline constexpr double kDistributionTolerance = 1e-9;

/// Number of basis states for `n_qubits` qubits.
std::size_t state_count(int n_qubits);

/// Bit of `qubit` in basis index `index`. Qubit 0 is the most significant
/// (leftmost) character of the written bitstring, so for n = 3 the index 3
/// reads "011".
inline int qubit_bit(std::uint64_t index, int qubit, int n_qubits) {
  return static_cast<int>((index >> (n_qubits - 1 - qubit)) & 1U);
}

/// A length-2^n probability vector over computational basis outcomes.
/// Entries are nonnegative and sum to one within kDistributionTolerance.
class ProbabilityDistribution {
 public:
  /// Validates length, sign and normalization; throws ValidationError.
  ProbabilityDistribution(int n_qubits, std::vector<double> values);

  static ProbabilityDistribution one_hot(int n_qubits, std::uint64_t index);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

  friend bool operator==(const ProbabilityDistribution&,
                         const ProbabilityDistribution&) = default;

 private:
  int n_qubits_;
  std::vector<double> values_;
};

struct QubitMarginal {
  double p0 = 1.0;
  double p1 = 0.0;
};

/// Outcome probabilities of a single qubit, summed over all other qubits.
QubitMarginal marginalize(const ProbabilityDistribution& dist, int qubit);

/// (sum_j sqrt(p_j q_j))^2
double fidelity(const ProbabilityDistribution& p,
                const ProbabilityDistribution& q);

/// Sum of squared differences divided by 2^n - 1.
double mse(const ProbabilityDistribution& p, const ProbabilityDistribution& q);

/// Discrete Hellinger distance, in [0, 1].
double hellinger(const ProbabilityDistribution& p,
                 const ProbabilityDistribution& q);

/// Zeroes every negative entry and rescales the rest to sum to one.
/// Throws DegenerateVectorError when no entry is positive.
ProbabilityDistribution clamp_and_renormalize(std::span<const double> raw);

}  // namespace readout_pem
