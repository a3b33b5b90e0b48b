#include "readout_pem/circuit.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "readout_pem/errors.hpp"

namespace readout_pem {

namespace {

using cplx = std::complex<double>;

void validate_gate(const Gate& gate, int n_qubits) {
  const std::size_t arity = gate.kind == GateKind::CX ? 2 : 1;
  if (gate.targets.size() != arity) {
    throw CircuitError(std::string(to_string(gate.kind)) + " expects " +
                       std::to_string(arity) + " target(s)");
  }
  for (int q : gate.targets) {
    if (q < 0 || q >= n_qubits) {
      throw CircuitError("gate target " + std::to_string(q) +
                         " out of range for " + std::to_string(n_qubits) +
                         " qubits");
    }
  }
  if (arity == 2 && gate.targets[0] == gate.targets[1]) {
    throw CircuitError("CX control and target coincide");
  }
  if (gate.kind == GateKind::RY &&
      !(std::isfinite(gate.theta) && gate.theta >= 0.0 &&
        gate.theta < 2.0 * std::numbers::pi)) {
    throw CircuitError("RY angle outside [0, 2pi)");
  }
}

}  // namespace

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::X: return "X";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::T: return "T";
    case GateKind::RY: return "RY";
    case GateKind::CX: return "CX";
  }
  return "?";
}

GateKind gate_kind_from_string(std::string_view name) {
  for (GateKind k : {GateKind::X, GateKind::H, GateKind::S, GateKind::T,
                     GateKind::RY, GateKind::CX}) {
    if (to_string(k) == name) return k;
  }
  throw CircuitError("unknown gate kind '" + std::string(name) + "'");
}

Gate Gate::single(GateKind kind, int qubit, double theta) {
  return Gate{kind, {qubit}, kind == GateKind::RY ? theta : 0.0};
}

Gate Gate::cx(int control, int target) {
  return Gate{GateKind::CX, {control, target}, 0.0};
}

Unitary2 single_qubit_unitary(GateKind kind, double theta) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case GateKind::X: return {0.0, 1.0, 1.0, 0.0};
    case GateKind::H: return {r, r, r, -r};
    case GateKind::S: return {1.0, 0.0, 0.0, cplx(0.0, 1.0)};
    case GateKind::T: return {1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4)};
    case GateKind::RY: {
      const double c = std::cos(theta / 2), s = std::sin(theta / 2);
      return {c, -s, s, c};
    }
    case GateKind::CX: break;
  }
  throw CircuitError("CX has no single-qubit unitary");
}

Circuit::Circuit(int n_qubits, std::vector<Layer> layers, int depth)
    : n_qubits_(n_qubits), layers_(std::move(layers)), depth_(depth) {
  if (n_qubits_ < 1) throw CircuitError("circuit needs at least one qubit");
  state_count(n_qubits_);
  if (depth_ < 1 || static_cast<std::size_t>(depth_) != layers_.size()) {
    throw CircuitError("declared depth " + std::to_string(depth_) +
                       " does not match " + std::to_string(layers_.size()) +
                       " layers");
  }
  for (const Layer& layer : layers_) {
    std::vector<bool> used(n_qubits_, false);
    for (const Gate& gate : layer) {
      validate_gate(gate, n_qubits_);
      for (int q : gate.targets) {
        if (used[q]) {
          throw CircuitError("qubit " + std::to_string(q) +
                             " used twice in one layer");
        }
        used[q] = true;
      }
    }
  }
}

StateVector::StateVector(int n_qubits)
    : n_qubits_(n_qubits), amplitudes_(state_count(n_qubits), cplx{}) {
  amplitudes_[0] = 1.0;
}

void StateVector::apply(const Gate& gate) {
  validate_gate(gate, n_qubits_);
  if (gate.kind == GateKind::CX) {
    apply_cx(gate.targets[0], gate.targets[1]);
  } else {
    apply_single(single_qubit_unitary(gate.kind, gate.theta), gate.targets[0]);
  }
}

void StateVector::apply_single(const Unitary2& u, int qubit) {
  const std::size_t stride = std::size_t{1} << (n_qubits_ - 1 - qubit);
  const std::size_t dim = amplitudes_.size();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const cplx a0 = amplitudes_[i];
      const cplx a1 = amplitudes_[i + stride];
      amplitudes_[i] = u[0] * a0 + u[1] * a1;
      amplitudes_[i + stride] = u[2] * a0 + u[3] * a1;
    }
  }
}

void StateVector::apply_cx(int control, int target) {
  const std::size_t cmask = std::size_t{1} << (n_qubits_ - 1 - control);
  const std::size_t tmask = std::size_t{1} << (n_qubits_ - 1 - target);
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    if ((i & cmask) && !(i & tmask)) std::swap(amplitudes_[i], amplitudes_[i | tmask]);
  }
}

double StateVector::norm_squared() const {
  double total = 0.0;
  for (const cplx& a : amplitudes_) total += std::norm(a);
  return total;
}

ProbabilityDistribution StateVector::probabilities() const {
  std::vector<double> p(amplitudes_.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::norm(amplitudes_[j]);
  return {n_qubits_, std::move(p)};
}

ProbabilityDistribution simulate(const Circuit& circuit) {
  StateVector state(circuit.n_qubits());
  for (const Layer& layer : circuit.layers()) {
    for (const Gate& gate : layer) state.apply(gate);
  }
  return state.probabilities();
}

Circuit circuit_all_zeros(int n_qubits) {
  if (n_qubits < 1) throw ParameterError("n must be >= 1");
  return Circuit(n_qubits, {Layer{}}, 1);
}

Circuit circuit_all_ones(int n_qubits) {
  if (n_qubits < 1) throw ParameterError("n must be >= 1");
  Layer layer;
  for (int q = 0; q < n_qubits; ++q) layer.push_back(Gate::single(GateKind::X, q));
  return Circuit(n_qubits, {std::move(layer)}, 1);
}

Circuit random_circuit(int n_qubits, int depth, std::uint64_t seed) {
  if (n_qubits < 1 || depth < 1) {
    throw ParameterError("random_circuit needs n >= 1 and depth >= 1");
  }
  static constexpr GateKind kSingles[] = {GateKind::X, GateKind::H, GateKind::S,
                                          GateKind::T, GateKind::RY};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  std::vector<Layer> layers(depth);
  for (Layer& layer : layers) {
    int q = 0;
    while (q < n_qubits) {
      if (q + 1 < n_qubits && unit(rng) < kTwoQubitGateProbability) {
        layer.push_back(Gate::cx(q, q + 1));
        q += 2;
        continue;
      }
      const GateKind kind = kSingles[pick(rng)];
      double theta = 0.0;
      if (kind == GateKind::RY) {
        theta = angle(rng);
        // uniform_real_distribution may round up to the open bound.
        if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
      }
      layer.push_back(Gate::single(kind, q, theta));
      ++q;
    }
  }
  return Circuit(n_qubits, std::move(layers), depth);
}

}  // namespace readout_pem
