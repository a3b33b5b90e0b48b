#pragma once

#include <array>

namespace readout_pem {

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Single-qubit readout confusion P(measured | prepared): rows indexed by the
/// prepared bit, columns by the measured bit. Row-stochastic and strictly
/// diagonally dominant.
class ConfusionMatrix {
 public:
  ConfusionMatrix() : ConfusionMatrix(identity_entries()) {}
  /// Throws ValidationError when an invariant does not hold.
  explicit ConfusionMatrix(const Matrix2& entries);

  static ConfusionMatrix from_flip_rates(double flip01, double flip10);

  double operator()(int prepared, int measured) const {
    return entries_[prepared][measured];
  }
  const Matrix2& entries() const noexcept { return entries_; }

  /// Probability of reading 1 after preparing 0.
  double flip01() const noexcept { return entries_[0][1]; }
  /// Probability of reading 0 after preparing 1.
  double flip10() const noexcept { return entries_[1][0]; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  static Matrix2 identity_entries() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

  Matrix2 entries_;
};

}  // namespace readout_pem
