#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "readout_pem/confusion.hpp"
#include "readout_pem/prob.hpp"

namespace readout_pem {

enum class NoiseSet { calibration, runtime };

/// Synthetic readout backend. Each qubit carries one confusion matrix at
/// calibration time and a drifted one at run time; qubits are independent.
struct NoiseModel {
  int n_qubits = 0;
  std::vector<ConfusionMatrix> calibration;
  std::vector<ConfusionMatrix> runtime;

  NoiseModel() = default;
  NoiseModel(int n, std::vector<ConfusionMatrix> calibration_set,
             std::vector<ConfusionMatrix> runtime_set);

  const std::vector<ConfusionMatrix>& confusions(NoiseSet which) const {
    return which == NoiseSet::calibration ? calibration : runtime;
  }

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

struct NoiseParameters {
  double base_eps01 = 0.02;
  double base_eps10 = 0.05;
  double drift_scale = 0.5;
};

inline constexpr double kFlipJitter = 0.3;

/// Calibration flips are the base rates jittered by up to +-30%; runtime
/// off-diagonals are the calibration ones scaled by (1 + u), u uniform in
/// [-drift_scale, drift_scale], with each row renormalized.
NoiseModel make_noise_model(int n_qubits, const NoiseParameters& params,
                            std::uint64_t seed);

/// Applies the transpose of Q_0 (x) Q_1 (x) ... (x) Q_{n-1} to `values` one
/// qubit axis at a time.
std::vector<double> apply_readout_transpose(
    std::span<const ConfusionMatrix> confusions, std::span<const double> values);

/// Exact noisy outcome distribution E^T p for the selected confusion set.
ProbabilityDistribution noisy_distribution(const ProbabilityDistribution& ideal,
                                           const NoiseModel& model,
                                           NoiseSet which);

struct ShotResult {
  int n_qubits = 0;
  std::uint64_t shots = 0;
  std::vector<std::uint64_t> counts;  // dense, indexed by outcome

  /// Throws ValidationError when counts do not add up to shots.
  void validate() const;
};

/// Draws `shots` outcomes by inverse CDF with a private mt19937_64.
ShotResult sample_shots(const ProbabilityDistribution& dist, std::uint64_t shots,
                        std::uint64_t seed);

ProbabilityDistribution empirical_distribution(const ShotResult& result);

}  // namespace readout_pem
