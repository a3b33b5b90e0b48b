#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "readout_pem/circuit.hpp"
#include "readout_pem/confusion.hpp"
#include "readout_pem/mitigation.hpp"
#include "readout_pem/noise.hpp"
#include "readout_pem/prob.hpp"

namespace readout_pem {

using Row2 = std::array<double, 2>;

/// Regression data for one qubit. Row k of `ideal` is the noiseless marginal
/// of training circuit k and row k of `noisy` the measured marginal.
struct RegressionDataset {
  int qubit = 0;
  std::vector<Row2> ideal;  // X, N x 2
  std::vector<Row2> noisy;  // Y, N x 2

  std::size_t size() const noexcept { return ideal.size(); }
  void validate() const;
};

/// Least-squares fit Y ~ X W. Column m of `weights` maps ideal marginals to
/// the probability of measuring m, so a perfect readout model gives
/// weights(b, m) = P(measure m | prepared b).
struct RegressionFit {
  Matrix2 weights{};
  double residual = 0.0;  // ||Y - X W||_F^2
  bool regularized = false;
};

RegressionDataset build_dataset(int qubit,
                                std::span<const ProbabilityDistribution> ideal_dists,
                                std::span<const ProbabilityDistribution> noisy_dists);

inline constexpr double kRidgeConditionLimit = 1e12;

/// Closed-form normal equations. Falls back to ridge regression with
/// lambda = 1e-8 * trace(X^T X) / 2 when cond(X^T X) > 1e12.
RegressionFit fit_ols(const RegressionDataset& ds);

/// Sum of squared residuals of `weights` on `ds`.
double regression_residual(const RegressionDataset& ds, const Matrix2& weights);

inline constexpr double kBlendFloor = 1e-6;

/// (1 - eta) Q + eta W, entries clamped to [1e-6, 1], rows renormalized.
/// Throws PersonalizationError when the result is not diagonally dominant.
ConfusionMatrix blend_confusion(const ConfusionMatrix& q, const RegressionFit& fit,
                                double eta);

struct PemModel {
  double eta = 0.0;
  std::vector<ConfusionMatrix> updated_confusions;
  ErrorMatrix error_matrix;
  MitigationMatrix mitigation_matrix;
};

/// How noisy training/test distributions are produced.
struct SamplingOptions {
  std::uint64_t shots = 8192;
  bool analytic = false;  // use exact E^T p instead of finite shots
  std::uint64_t seed = 0;
};

/// Ideal and measured distributions for a circuit set. Circuit i is sampled
/// with derive_seed(options.seed, "shots", i), independent of scheduling.
struct CircuitData {
  std::vector<ProbabilityDistribution> ideal;
  std::vector<ProbabilityDistribution> measured;
};

CircuitData collect_circuit_data(std::span<const Circuit> circuits,
                                 const NoiseModel& model, NoiseSet which,
                                 const SamplingOptions& options);

/// Regression + blend for every qubit, then assemble and invert E*.
PemModel personalize(std::span<const ConfusionMatrix> confusions,
                     const CircuitData& training, double eta);

/// Full training: runs the circuits through the runtime noise, then
/// personalizes. PersonalizationError carries the failing qubit.
PemModel train_pem(std::span<const ConfusionMatrix> confusions,
                   std::span<const Circuit> training_circuits, const NoiseModel& model,
                   double eta, const SamplingOptions& options);

struct EtaPoint {
  double eta = 0.0;
  double mse = 0.0;
};

struct QuadraticFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Least-squares a*eta^2 + b*eta + c through the curve points.
QuadraticFit fit_quadratic(std::span<const EtaPoint> curve);

struct EtaSelection {
  double eta_star = 0.0;
  QuadraticFit fit;
  bool used_fallback = false;  // true when the fit had no interior minimum
};

/// Vertex -b/(2a) clamped to the grid range when a > 0, else grid argmin.
EtaSelection select_eta(std::span<const EtaPoint> curve);

struct TuneResult {
  EtaSelection selection;
  std::vector<EtaPoint> curve;
};

/// 0.01 plus 0.05, 0.10, ..., 0.50.
std::vector<double> default_eta_grid();

/// Trains PEM for every grid value and scores mean test MSE against the
/// ideal distributions, then fits the curve.
TuneResult tune_eta(std::span<const ConfusionMatrix> confusions,
                    std::span<const Circuit> training_circuits,
                    std::span<const Circuit> test_circuits, const NoiseModel& model,
                    std::span<const double> grid, const SamplingOptions& options);

}  // namespace readout_pem
