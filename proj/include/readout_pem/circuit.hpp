#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

#include "readout_pem/prob.hpp"

namespace readout_pem {

enum class GateKind { X, H, S, T, RY, CX };

std::string_view to_string(GateKind kind);
GateKind gate_kind_from_string(std::string_view name);

/// One gate. CX lists (control, target); every other kind lists one qubit.
/// `theta` is only meaningful for RY.
struct Gate {
  GateKind kind = GateKind::X;
  std::vector<int> targets;
  double theta = 0.0;

  static Gate single(GateKind kind, int qubit, double theta = 0.0);
  static Gate cx(int control, int target);

  friend bool operator==(const Gate&, const Gate&) = default;
};

using Layer = std::vector<Gate>;

/// 2x2 unitary of a single-qubit gate, row-major.
using Unitary2 = std::array<std::complex<double>, 4>;
Unitary2 single_qubit_unitary(GateKind kind, double theta = 0.0);

class Circuit {
 public:
  /// Throws CircuitError when a layer reuses a qubit, a target is out of
  /// range, a gate is malformed, or the layer count differs from `depth`.
  Circuit(int n_qubits, std::vector<Layer> layers, int depth);

  int n_qubits() const noexcept { return n_qubits_; }
  int depth() const noexcept { return depth_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int n_qubits_;
  std::vector<Layer> layers_;
  int depth_;
};

class StateVector {
 public:
  explicit StateVector(int n_qubits);  // |0...0>

  int n_qubits() const noexcept { return n_qubits_; }
  const std::vector<std::complex<double>>& amplitudes() const noexcept {
    return amplitudes_;
  }

  void apply(const Gate& gate);
  double norm_squared() const;
  ProbabilityDistribution probabilities() const;

 private:
  void apply_single(const Unitary2& u, int qubit);
  void apply_cx(int control, int target);

  int n_qubits_;
  std::vector<std::complex<double>> amplitudes_;
};

/// Ideal (noiseless) outcome distribution of `circuit` run on |0...0>.
ProbabilityDistribution simulate(const Circuit& circuit);

/// Calibration circuit whose ideal outcome is |00...0>: one empty layer.
Circuit circuit_all_zeros(int n_qubits);

/// Calibration circuit whose ideal outcome is |11...1>: X on every qubit.
Circuit circuit_all_ones(int n_qubits);

inline constexpr double kTwoQubitGateProbability = 0.25;

/// Layered random circuit, a pure function of (n_qubits, depth, seed).
/// Each layer walks qubits left to right; where a right neighbour is free a
/// CX(i, i+1) is placed with probability 0.25, otherwise one gate is drawn
/// uniformly from {X, H, S, T, RY(theta)}.
Circuit random_circuit(int n_qubits, int depth, std::uint64_t seed);

}  // namespace readout_pem
