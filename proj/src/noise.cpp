#include "readout_pem/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "readout_pem/errors.hpp"

namespace readout_pem {

ConfusionMatrix::ConfusionMatrix(const Matrix2& entries) : entries_(entries) {
  for (int r = 0; r < 2; ++r) {
    const auto& row = entries_[r];
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw ValidationError("confusion entry outside [0, 1]");
      }
    }
    if (std::abs(row[0] + row[1] - 1.0) > 1e-9) {
      throw ValidationError("confusion row " + std::to_string(r) +
                            " does not sum to one");
    }
    if (!(row[r] > row[1 - r])) {
      throw ValidationError("confusion row " + std::to_string(r) +
                            " is not diagonally dominant");
    }
  }
}

ConfusionMatrix ConfusionMatrix::from_flip_rates(double flip01, double flip10) {
  return ConfusionMatrix(Matrix2{{{1.0 - flip01, flip01}, {flip10, 1.0 - flip10}}});
}

NoiseModel::NoiseModel(int n, std::vector<ConfusionMatrix> calibration_set,
                       std::vector<ConfusionMatrix> runtime_set)
    : n_qubits(n),
      calibration(std::move(calibration_set)),
      runtime(std::move(runtime_set)) {
  state_count(n_qubits);
  if (calibration.size() != static_cast<std::size_t>(n_qubits) ||
      runtime.size() != static_cast<std::size_t>(n_qubits)) {
    throw ValidationError("noise model needs one confusion per qubit");
  }
}

NoiseModel make_noise_model(int n_qubits, const NoiseParameters& params,
                            std::uint64_t seed) {
  const double e01 = params.base_eps01, e10 = params.base_eps10;
  if (!(e01 > 0.0 && e01 < 0.5 && e10 > 0.0 && e10 < 0.5)) {
    throw ParameterError("base flip rates must lie in (0, 0.5)");
  }
  if (!(params.drift_scale >= 0.0) || !std::isfinite(params.drift_scale)) {
    throw ParameterError("drift_scale must be >= 0");
  }
  // Worst case after jitter must still leave room for the drift.
  const double max_eps = std::max(e01, e10) * (1.0 + kFlipJitter);
  if (params.drift_scale > 1.0) {
    throw ParameterError("drift_scale above 1 makes off-diagonals negative");
  }
  if (max_eps >= 0.5 || params.drift_scale >= (0.5 - max_eps) / max_eps) {
    throw ParameterError("flip rates and drift_scale break diagonal dominance");
  }
  state_count(n_qubits);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-kFlipJitter, kFlipJitter);
  std::uniform_real_distribution<double> drift(-1.0, 1.0);

  std::vector<ConfusionMatrix> calibration, runtime;
  for (int q = 0; q < n_qubits; ++q) {
    const double f01 = e01 * (1.0 + jitter(rng));
    const double f10 = e10 * (1.0 + jitter(rng));
    const double u01 = params.drift_scale * drift(rng);
    const double u10 = params.drift_scale * drift(rng);

    const Matrix2 cal{{{1.0 - f01, f01}, {f10, 1.0 - f10}}};
    Matrix2 run{{{1.0 - f01, f01 * (1.0 + u01)}, {f10 * (1.0 + u10), 1.0 - f10}}};
    for (auto& row : run) {
      const double total = row[0] + row[1];
      row[0] /= total;
      row[1] /= total;
    }
    calibration.emplace_back(cal);
    runtime.emplace_back(run);
  }
  return NoiseModel(n_qubits, std::move(calibration), std::move(runtime));
}

std::vector<double> apply_readout_transpose(
    std::span<const ConfusionMatrix> confusions, std::span<const double> values) {
  const std::size_t n = confusions.size();
  if (n == 0 || values.size() != (std::size_t{1} << n)) {
    throw DimensionError("confusion count does not match vector length");
  }
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t q = 0; q < n; ++q) {
    const ConfusionMatrix& c = confusions[q];
    const std::size_t stride = std::size_t{1} << (n - 1 - q);
    for (std::size_t base = 0; base < out.size(); base += 2 * stride) {
      for (std::size_t i = base; i < base + stride; ++i) {
        const double prepared0 = out[i], prepared1 = out[i + stride];
        out[i] = c(0, 0) * prepared0 + c(1, 0) * prepared1;
        out[i + stride] = c(0, 1) * prepared0 + c(1, 1) * prepared1;
      }
    }
  }
  return out;
}

ProbabilityDistribution noisy_distribution(const ProbabilityDistribution& ideal,
                                           const NoiseModel& model,
                                           NoiseSet which) {
  if (ideal.n_qubits() != model.n_qubits) {
    throw DimensionError("distribution and noise model disagree on qubit count");
  }
  auto values = apply_readout_transpose(model.confusions(which), ideal.values());
  // Column-stochastic map: only rounding can move the total off one.
  double total = 0.0;
  for (double& v : values) {
    v = std::max(v, 0.0);
    total += v;
  }
  for (double& v : values) v /= total;
  return {ideal.n_qubits(), std::move(values)};
}

void ShotResult::validate() const {
  if (shots == 0) throw ValidationError("shot result with zero shots");
  if (counts.size() != state_count(n_qubits)) {
    throw ValidationError("shot counts have the wrong length");
  }
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total != shots) throw ValidationError("shot counts do not sum to shots");
}

ShotResult sample_shots(const ProbabilityDistribution& dist, std::uint64_t shots,
                        std::uint64_t seed) {
  if (shots == 0) throw ParameterError("shots must be >= 1");
  const auto p = dist.values();
  std::vector<double> cdf(p.size());
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    running += p[j];
    cdf[j] = running;
    if (p[j] > 0.0) last_positive = j;
  }

  ShotResult result{dist.n_qubits(), shots, std::vector<std::uint64_t>(p.size(), 0)};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = unit(rng) * running;
    auto idx = static_cast<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    // Zero-probability tail entries share the final CDF value.
    idx = std::min(idx, last_positive);
    ++result.counts[idx];
  }
  return result;
}

ProbabilityDistribution empirical_distribution(const ShotResult& result) {
  result.validate();
  std::vector<double> values(result.counts.size());
  const double shots = static_cast<double>(result.shots);
  for (std::size_t j = 0; j < values.size(); ++j) {
    values[j] = static_cast<double>(result.counts[j]) / shots;
  }
  return {result.n_qubits, std::move(values)};
}

}  // namespace readout_pem
