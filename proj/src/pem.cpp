#include "readout_pem/pem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "readout_pem/errors.hpp"
#include "readout_pem/parallel.hpp"
#include "readout_pem/seeding.hpp"

namespace readout_pem {

namespace {

void check_ideal_row(const Row2& row) {
  if (!std::isfinite(row[0]) || !std::isfinite(row[1]) ||
      std::abs(row[0] + row[1] - 1.0) > kDistributionTolerance) {
    throw DatasetError("ideal marginal does not sum to one");
  }
}

// Targets only need to be finite: the fit is plain least squares and is
// also used on synthetic targets that are not distributions.
void check_target_row(const Row2& row) {
  if (!std::isfinite(row[0]) || !std::isfinite(row[1])) {
    throw DatasetError("noisy row is not finite");
  }
}

// Eigenvalues of the symmetric 2x2 [[a, b], [b, d]], ascending.
std::array<double, 2> symmetric_eigenvalues(double a, double b, double d) {
  const double mean = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), b);
  return {mean - radius, mean + radius};
}

bool eta_in_open_unit(double eta) { return eta > 0.0 && eta < 1.0; }

}  // namespace

void RegressionDataset::validate() const {
  if (ideal.size() != noisy.size()) {
    throw DatasetError("ideal and noisy rows differ in count");
  }
  if (ideal.size() < 2) throw DatasetError("regression needs at least two rows");
  for (const Row2& r : ideal) check_ideal_row(r);
  for (const Row2& r : noisy) check_target_row(r);
}

RegressionDataset build_dataset(int qubit,
                                std::span<const ProbabilityDistribution> ideal_dists,
                                std::span<const ProbabilityDistribution> noisy_dists) {
  if (ideal_dists.size() != noisy_dists.size()) {
    throw DatasetError("got " + std::to_string(ideal_dists.size()) + " ideal and " +
                       std::to_string(noisy_dists.size()) + " noisy distributions");
  }
  if (ideal_dists.size() < 2) throw DatasetError("regression needs at least two rows");
  const int n = ideal_dists.front().n_qubits();
  if (qubit < 0 || qubit >= n) throw IndexError("qubit out of range");

  RegressionDataset ds;
  ds.qubit = qubit;
  ds.ideal.reserve(ideal_dists.size());
  ds.noisy.reserve(noisy_dists.size());
  for (std::size_t k = 0; k < ideal_dists.size(); ++k) {
    if (ideal_dists[k].n_qubits() != n || noisy_dists[k].n_qubits() != n) {
      throw DatasetError("training distributions disagree on qubit count");
    }
    const QubitMarginal x = marginalize(ideal_dists[k], qubit);
    const QubitMarginal y = marginalize(noisy_dists[k], qubit);
    ds.ideal.push_back({x.p0, x.p1});
    ds.noisy.push_back({y.p0, y.p1});
  }
  return ds;
}

double regression_residual(const RegressionDataset& ds, const Matrix2& weights) {
  double sum = 0.0;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    for (int m = 0; m < 2; ++m) {
      const double predicted =
          ds.ideal[k][0] * weights[0][m] + ds.ideal[k][1] * weights[1][m];
      const double r = ds.noisy[k][m] - predicted;
      sum += r * r;
    }
  }
  return sum;
}

RegressionFit fit_ols(const RegressionDataset& ds) {
  ds.validate();
  // Normal equations: G = X^T X, R = X^T Y.
  double g00 = 0, g01 = 0, g11 = 0;
  Matrix2 r{};
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const Row2& x = ds.ideal[k];
    const Row2& y = ds.noisy[k];
    g00 += x[0] * x[0];
    g01 += x[0] * x[1];
    g11 += x[1] * x[1];
    for (int b = 0; b < 2; ++b) {
      for (int m = 0; m < 2; ++m) r[b][m] += x[b] * y[m];
    }
  }

  RegressionFit fit;
  const auto [lo, hi] = symmetric_eigenvalues(g00, g01, g11);
  if (!(lo > 0.0) || hi / lo > kRidgeConditionLimit) {
    const double lambda = 1e-8 * (g00 + g11) / 2.0;
    g00 += lambda;
    g11 += lambda;
    fit.regularized = true;
  }
  const double det = g00 * g11 - g01 * g01;
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw DegenerateDesignError("qubit " + std::to_string(ds.qubit) +
                                ": design matrix is degenerate even with ridge");
  }
  for (int m = 0; m < 2; ++m) {
    fit.weights[0][m] = (g11 * r[0][m] - g01 * r[1][m]) / det;
    fit.weights[1][m] = (g00 * r[1][m] - g01 * r[0][m]) / det;
  }
  fit.residual = regression_residual(ds, fit.weights);
  return fit;
}

ConfusionMatrix blend_confusion(const ConfusionMatrix& q, const RegressionFit& fit,
                                double eta) {
  if (!eta_in_open_unit(eta)) throw ParameterError("eta must lie in (0, 1)");
  Matrix2 blended{};
  for (int b = 0; b < 2; ++b) {
    double total = 0.0;
    for (int m = 0; m < 2; ++m) {
      const double raw = (1.0 - eta) * q(b, m) + eta * fit.weights[b][m];
      blended[b][m] = std::clamp(std::isfinite(raw) ? raw : 0.0, kBlendFloor, 1.0);
      total += blended[b][m];
    }
    for (int m = 0; m < 2; ++m) blended[b][m] /= total;
    if (!(blended[b][b] > blended[b][1 - b])) {
      throw PersonalizationError("blended confusion row " + std::to_string(b) +
                                 " lost diagonal dominance");
    }
  }
  return ConfusionMatrix(blended);
}

CircuitData collect_circuit_data(std::span<const Circuit> circuits,
                                 const NoiseModel& model, NoiseSet which,
                                 const SamplingOptions& options) {
  if (!options.analytic && options.shots == 0) throw ParameterError("shots must be >= 1");
  const std::size_t count = circuits.size();
  std::vector<std::optional<ProbabilityDistribution>> ideal(count), measured(count);
  parallel_for(count, [&](std::size_t i) {
    if (circuits[i].n_qubits() != model.n_qubits) {
      throw DimensionError("circuit " + std::to_string(i) +
                           " does not match the noise model qubit count");
    }
    ideal[i] = simulate(circuits[i]);
    auto exact = noisy_distribution(*ideal[i], model, which);
    measured[i] = options.analytic
                      ? std::move(exact)
                      : empirical_distribution(sample_shots(
                            exact, options.shots, derive_seed(options.seed, "shots", i)));
  });
  CircuitData data;
  data.ideal.reserve(count);
  data.measured.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    data.ideal.push_back(std::move(*ideal[i]));
    data.measured.push_back(std::move(*measured[i]));
  }
  return data;
}

PemModel personalize(std::span<const ConfusionMatrix> confusions,
                     const CircuitData& training, double eta) {
  if (!eta_in_open_unit(eta)) throw ParameterError("eta must lie in (0, 1)");
  if (training.ideal.empty()) throw DatasetError("training set is empty");
  const int n = training.ideal.front().n_qubits();
  if (confusions.size() != static_cast<std::size_t>(n)) {
    throw DimensionError("confusion count does not match training qubit count");
  }

  std::vector<ConfusionMatrix> updated;
  updated.reserve(n);
  for (int q = 0; q < n; ++q) {
    try {
      const RegressionDataset ds = build_dataset(q, training.ideal, training.measured);
      updated.push_back(blend_confusion(confusions[q], fit_ols(ds), eta));
    } catch (const PersonalizationError& e) {
      throw PersonalizationError("qubit " + std::to_string(q) + ": " + e.what(), q);
    }
  }
  ErrorMatrix em = assemble_error_matrix(updated);
  MitigationMatrix mm = invert_error_matrix(em);
  return PemModel{eta, std::move(updated), std::move(em), std::move(mm)};
}

PemModel train_pem(std::span<const ConfusionMatrix> confusions,
                   std::span<const Circuit> training_circuits, const NoiseModel& model,
                   double eta, const SamplingOptions& options) {
  if (training_circuits.empty()) throw DatasetError("no training circuits");
  if (!eta_in_open_unit(eta)) throw ParameterError("eta must lie in (0, 1)");
  const CircuitData data =
      collect_circuit_data(training_circuits, model, NoiseSet::runtime, options);
  return personalize(confusions, data, eta);
}

QuadraticFit fit_quadratic(std::span<const EtaPoint> curve) {
  if (curve.size() < 3) throw ParameterError("quadratic fit needs three points");
  // Normal equations in the monomial basis (eta^2, eta, 1).
  DenseMatrix normal(3, 3);
  std::vector<double> rhs(3, 0.0);
  for (const EtaPoint& p : curve) {
    const double basis[3] = {p.eta * p.eta, p.eta, 1.0};
    for (int i = 0; i < 3; ++i) {
      rhs[i] += basis[i] * p.mse;
      for (int j = 0; j < 3; ++j) normal(i, j) += basis[i] * basis[j];
    }
  }
  const auto coeffs = LuFactorization(std::move(normal)).solve(rhs);
  return {coeffs[0], coeffs[1], coeffs[2]};
}

EtaSelection select_eta(std::span<const EtaPoint> curve) {
  if (curve.size() < 4) throw ParameterError("eta grid needs at least four points");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, scale = 0.0;
  const EtaPoint* best = &curve.front();
  for (const EtaPoint& p : curve) {
    if (!(p.eta > 0.0 && p.eta <= 0.5)) throw ParameterError("eta grid values must lie in (0, 0.5]");
    lo = std::min(lo, p.eta);
    hi = std::max(hi, p.eta);
    scale = std::max(scale, std::abs(p.mse));
    if (p.mse < best->mse) best = &p;
  }

  EtaSelection sel;
  sel.fit = fit_quadratic(curve);
  // A curvature at rounding level means the curve is flat.
  if (sel.fit.a > 1e-9 * std::max(scale, std::numeric_limits<double>::min())) {
    sel.eta_star = std::clamp(-sel.fit.b / (2.0 * sel.fit.a), lo, hi);
  } else {
    sel.eta_star = best->eta;
    sel.used_fallback = true;
  }
  return sel;
}

std::vector<double> default_eta_grid() {
  std::vector<double> grid{0.01};
  for (int i = 1; i <= 10; ++i) grid.push_back(0.05 * i);
  return grid;
}

TuneResult tune_eta(std::span<const ConfusionMatrix> confusions,
                    std::span<const Circuit> training_circuits,
                    std::span<const Circuit> test_circuits, const NoiseModel& model,
                    std::span<const double> grid, const SamplingOptions& options) {
  if (test_circuits.empty()) throw DatasetError("no tuning test circuits");
  SamplingOptions train_opts = options, test_opts = options;
  train_opts.seed = derive_seed(options.seed, "tune-train");
  test_opts.seed = derive_seed(options.seed, "tune-test");
  const CircuitData training =
      collect_circuit_data(training_circuits, model, NoiseSet::runtime, train_opts);
  const CircuitData testing =
      collect_circuit_data(test_circuits, model, NoiseSet::runtime, test_opts);

  TuneResult result;
  for (double eta : grid) {
    const PemModel pem = personalize(confusions, training, eta);
    double total = 0.0;
    for (std::size_t i = 0; i < test_circuits.size(); ++i) {
      total += mse(testing.ideal[i], mitigate(testing.measured[i], pem.mitigation_matrix));
    }
    result.curve.push_back({eta, total / static_cast<double>(test_circuits.size())});
  }
  result.selection = select_eta(result.curve);
  return result;
}

}  // namespace readout_pem
