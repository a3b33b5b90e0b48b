#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "readout_pem/circuit.hpp"
#include "readout_pem/errors.hpp"
#include "readout_pem/pem.hpp"

using namespace readout_pem;

namespace {

// Noisy marginal rows y_k = Q^T x_k, i.e. Y = X Q in row-sample layout.
RegressionDataset exact_dataset(const std::vector<Row2>& x, const Matrix2& q) {
  RegressionDataset ds;
  ds.ideal = x;
  for (const Row2& r : x) {
    ds.noisy.push_back({r[0] * q[0][0] + r[1] * q[1][0], r[0] * q[0][1] + r[1] * q[1][1]});
  }
  return ds;
}

std::vector<Row2> random_rows(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Row2> x;
  for (int i = 0; i < count; ++i) {
    const double a = u(rng);
    x.push_back({a, 1.0 - a});
  }
  return x;
}

double max_abs(const Matrix2& a, const Matrix2& b) {
  double worst = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(a[r][c] - b[r][c]));
  return worst;
}

const Matrix2 kQ{{{0.9, 0.1}, {0.2, 0.8}}};

}  // namespace

TEST_CASE("build_dataset") {
  const std::vector<ProbabilityDistribution> ideal{ProbabilityDistribution(1, {1, 0}),
                                                   ProbabilityDistribution(1, {0.5, 0.5})};
  SUBCASE("noise-free data gives X = Y") {
    const auto ds = build_dataset(0, ideal, ideal);
    CHECK(ds.ideal == ds.noisy);
  }
  SUBCASE("hand-computed noisy marginals") {
    const std::vector<ProbabilityDistribution> noisy{ProbabilityDistribution(1, {0.9, 0.1}),
                                                     ProbabilityDistribution(1, {0.55, 0.45})};
    const auto ds = build_dataset(0, ideal, noisy);
    CHECK(ds.ideal[1] == Row2{0.5, 0.5});
    CHECK(ds.noisy[0][0] == doctest::Approx(0.9));
    CHECK(ds.noisy[1][1] == doctest::Approx(0.45));
    for (const auto& r : ds.noisy) CHECK(std::abs(r[0] + r[1] - 1.0) < 1e-9);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_dataset(0, ideal, std::span(ideal).first(1)), DatasetError);
    CHECK_THROWS_AS(build_dataset(0, std::span(ideal).first(1), std::span(ideal).first(1)),
                    DatasetError);
    CHECK_THROWS_AS(build_dataset(1, ideal, ideal), IndexError);
  }
}

TEST_CASE("fit_ols") {
  SUBCASE("two points determine the model") {
    const auto fit = fit_ols(exact_dataset({{1, 0}, {0.5, 0.5}}, kQ));
    CHECK(max_abs(fit.weights, kQ) < 1e-12);
    CHECK(fit.residual < 1e-18);
    CHECK_FALSE(fit.regularized);
  }
  SUBCASE("exact recovery on random fixtures") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix2 q = oracle::random_confusion(rng, 0.45).entries();
      const auto fit = fit_ols(exact_dataset(random_rows(rng, 2 + trial % 50), q));
      CHECK(max_abs(fit.weights, q) < 1e-9);
      CHECK(fit.residual < 1e-18);
    }
  }
  SUBCASE("plain least squares identity: Y = X Q^T gives W = Q^T") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix2 q = oracle::random_confusion(rng, 0.45).entries();
      const Matrix2 qt{{{q[0][0], q[1][0]}, {q[0][1], q[1][1]}}};
      const auto fit = fit_ols(exact_dataset(random_rows(rng, 3 + trial % 20), qt));
      CHECK(max_abs(fit.weights, qt) < 1e-9);
      CHECK(fit.residual < 1e-18);
    }
  }
  SUBCASE("residual matches independent recomputation on noisy data") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> noise(0.0, 0.01);
    auto ds = exact_dataset(random_rows(rng, 40), kQ);
    for (auto& r : ds.noisy) {
      const double d = noise(rng);
      r[0] += d;
      r[1] -= d;
    }
    const auto fit = fit_ols(ds);
    double sum = 0.0;
    for (std::size_t k = 0; k < ds.size(); ++k) {
      for (int m = 0; m < 2; ++m) {
        const double pred = ds.ideal[k][0] * fit.weights[0][m] + ds.ideal[k][1] * fit.weights[1][m];
        sum += std::pow(ds.noisy[k][m] - pred, 2);
      }
    }
    CHECK(fit.residual == doctest::Approx(sum).epsilon(1e-9));
    CHECK(fit.residual > 0.0);
    // Any perturbation of the optimum does not lower the residual.
    Matrix2 w = fit.weights;
    w[0][1] += 1e-4;
    CHECK(regression_residual(ds, w) >= fit.residual);
  }
  SUBCASE("collinear design falls back to ridge") {
    const auto fit = fit_ols(exact_dataset({{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}}, kQ));
    CHECK(fit.regularized);
    CHECK(std::isfinite(fit.weights[0][0]));
  }
  SUBCASE("invalid datasets") {
    RegressionDataset ds = exact_dataset({{1, 0}}, kQ);
    CHECK_THROWS_AS(fit_ols(ds), DatasetError);
    ds = exact_dataset({{1, 0}, {0.5, 0.4}}, kQ);
    CHECK_THROWS_AS(fit_ols(ds), DatasetError);
    ds = exact_dataset({{1, 0}, {0.5, 0.5}}, kQ);
    ds.noisy[1][0] = std::nan("");
    CHECK_THROWS_AS(fit_ols(ds), DatasetError);
  }
}

TEST_CASE("blend_confusion") {
  const ConfusionMatrix q(Matrix2{{{0.95, 0.05}, {0.1, 0.9}}});
  SUBCASE("perfect model is a fixed point") {
    for (double eta : {0.1, 0.23, 0.4, 0.9}) {
      const auto out = blend_confusion(q, RegressionFit{q.entries(), 0.0, false}, eta);
      CHECK(max_abs(out.entries(), q.entries()) < 1e-9);
    }
  }
  SUBCASE("vanishing eta") {
    const auto out = blend_confusion(q, RegressionFit{kQ, 0.0, false}, 1e-9);
    CHECK(max_abs(out.entries(), q.entries()) < 1e-8);
  }
  SUBCASE("half-way blend by hand") {
    const auto out = blend_confusion(q, RegressionFit{kQ, 0.0, false}, 0.5);
    CHECK(max_abs(out.entries(), Matrix2{{{0.925, 0.075}, {0.15, 0.85}}}) < 1e-12);
  }
  SUBCASE("negative weights are floored and rows renormalized") {
    const auto out = blend_confusion(q, RegressionFit{Matrix2{{{1.2, -0.3}, {0.1, 0.9}}}, 0, false}, 0.4);
    CHECK(out(0, 1) > 0.0);
    CHECK(out(0, 0) + out(0, 1) == doctest::Approx(1.0));
  }
  SUBCASE("losing dominance is a personalization failure") {
    CHECK_THROWS_AS(blend_confusion(q, RegressionFit{Matrix2{{{0.0, 1.0}, {0.1, 0.9}}}, 0, false}, 0.9),
                    PersonalizationError);
  }
  SUBCASE("eta range") {
    CHECK_THROWS_AS(blend_confusion(q, RegressionFit{kQ, 0, false}, 0.0), ParameterError);
    CHECK_THROWS_AS(blend_confusion(q, RegressionFit{kQ, 0, false}, 1.0), ParameterError);
  }
  SUBCASE("random fits stay stochastic, floored and Lipschitz in eta") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (int trial = 0; trial < 200; ++trial) {
      const ConfusionMatrix base = oracle::random_confusion(rng, 0.2);
      Matrix2 w = oracle::random_confusion(rng, 0.2).entries();
      for (auto& row : w)
        for (double& v : row) v += u(rng);
      // W with rows normalized, the comparison target for the bound.
      Matrix2 wn = w;
      for (auto& row : wn) {
        const double s = row[0] + row[1];
        row[0] /= s;
        row[1] /= s;
      }
      for (double eta : {0.1, 0.23, 0.4}) {
        const auto out = blend_confusion(base, RegressionFit{w, 0, false}, eta);
        for (int r = 0; r < 2; ++r) {
          CHECK(out(r, 0) + out(r, 1) == doctest::Approx(1.0).epsilon(1e-12));
          CHECK(out(r, 0) >= kBlendFloor * 0.999);
          CHECK(out(r, 1) >= kBlendFloor * 0.999);
        }
        const double moved = max_abs(out.entries(), base.entries());
        const double bound = eta * max_abs(wn, base.entries()) +
                             eta * max_abs(w, wn) + 1e-9;  // normalization slack
        CHECK(moved <= bound);
      }
    }
  }
}

TEST_CASE("train_pem") {
  std::vector<Circuit> circuits;
  for (std::uint64_t i = 0; i < 150; ++i) circuits.push_back(random_circuit(4, 4, 10 + i));

  SUBCASE("no drift and exact data reproduce the calibration model") {
    const auto model = make_noise_model(4, {0.02, 0.05, 0.0}, 1);
    const auto pem = train_pem(model.calibration, circuits, model, 0.23, {0, true, 0});
    const auto em = assemble_error_matrix(model.calibration);
    CHECK(oracle::max_abs_diff(pem.error_matrix.entries().data(), em.entries().data()) < 1e-9);
    const auto em_mm = invert_error_matrix(em);
    const auto measured = noisy_distribution(simulate(circuits[0]), model, NoiseSet::runtime);
    CHECK(oracle::max_abs_diff(mitigate(measured, pem.mitigation_matrix).values(),
                               mitigate(measured, em_mm).values()) < 1e-6);
  }
  SUBCASE("deterministic for a fixed seed") {
    const auto model = make_noise_model(4, {0.02, 0.05, 0.5}, 2);
    const SamplingOptions opts{2048, false, 77};
    const auto a = train_pem(model.calibration, circuits, model, 0.23, opts);
    const auto b = train_pem(model.calibration, circuits, model, 0.23, opts);
    CHECK(a.updated_confusions == b.updated_confusions);
    CHECK(a.mitigation_matrix.entries() == b.mitigation_matrix.entries());
  }
  SUBCASE("personalized confusions move toward the runtime ones") {
    int closer = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto model = make_noise_model(4, {0.02, 0.05, 0.5}, 100 + seed);
      const auto pem = train_pem(model.calibration, circuits, model, 0.23, {0, true, 0});
      for (int q = 0; q < 4; ++q) {
        auto frob = [&](const ConfusionMatrix& a) {
          double s = 0.0;
          for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) s += std::pow(a(r, c) - model.runtime[q](r, c), 2);
          return std::sqrt(s);
        };
        closer += frob(pem.updated_confusions[q]) < frob(model.calibration[q]) ? 1 : 0;
        ++total;
      }
    }
    CHECK(closer >= 0.9 * total);
  }
  SUBCASE("invariants of the packaged model") {
    const auto model = make_noise_model(4, {0.02, 0.05, 0.5}, 3);
    const auto pem = train_pem(model.calibration, circuits, model, 0.23, {4096, false, 5});
    CHECK(pem.error_matrix == assemble_error_matrix(pem.updated_confusions));
    CHECK(pem.mitigation_matrix.residual() < 1e-8);
    CHECK(pem.eta == 0.23);
  }
  SUBCASE("errors") {
    const auto model = make_noise_model(4, {0.02, 0.05, 0.5}, 3);
    CHECK_THROWS_AS(train_pem(model.calibration, std::span<const Circuit>{}, model, 0.23, {}),
                    DatasetError);
    CHECK_THROWS_AS(train_pem(model.calibration, circuits, model, 1.5, {}), ParameterError);
    const auto other = make_noise_model(3, {0.02, 0.05, 0.5}, 3);
    CHECK_THROWS_AS(train_pem(other.calibration, circuits, other, 0.23, {}), DimensionError);
  }
}

TEST_CASE("personalization failure names the qubit") {
  // A calibration so wrong that any blend toward the data flips qubit 1.
  const std::vector<Circuit> circuits{random_circuit(2, 2, 1), random_circuit(2, 2, 2),
                                      random_circuit(2, 2, 3), random_circuit(2, 2, 4)};
  const NoiseModel runtime_swap(
      2, std::vector<ConfusionMatrix>(2),
      {ConfusionMatrix{}, ConfusionMatrix(Matrix2{{{0.51, 0.49}, {0.49, 0.51}}})});
  std::vector<ConfusionMatrix> stale{ConfusionMatrix{}, ConfusionMatrix(Matrix2{{{0.55, 0.45}, {0.45, 0.55}}})};
  // Relabel qubit 1's outcomes so the data looks like a readout that is
  // mostly wrong; the strong blend then loses dominance.
  CircuitData data = collect_circuit_data(circuits, runtime_swap, NoiseSet::runtime, {0, true, 0});
  for (auto& d : data.measured) {
    std::vector<double> v(d.values().begin(), d.values().end());
    std::swap(v[0], v[1]);
    std::swap(v[2], v[3]);
    d = ProbabilityDistribution(2, v);
  }
  try {
    personalize(stale, data, 0.9);
    FAIL("expected a personalization failure");
  } catch (const PersonalizationError& e) {
    CHECK(e.qubit() == 1);
  }
}

TEST_CASE("quadratic fit and eta selection") {
  const auto grid = default_eta_grid();
  REQUIRE(grid.size() == 11);
  CHECK(grid.front() == 0.01);
  CHECK(grid.back() == doctest::Approx(0.5));

  SUBCASE("published parabola") {
    std::vector<EtaPoint> curve;
    for (double e : grid) curve.push_back({e, 0.33 * e * e - 0.15 * e + 0.035});
    const auto sel = select_eta(curve);
    CHECK(sel.fit.a == doctest::Approx(0.33).epsilon(1e-9));
    CHECK(sel.fit.b == doctest::Approx(-0.15).epsilon(1e-9));
    CHECK(sel.fit.c == doctest::Approx(0.035).epsilon(1e-9));
    CHECK(sel.eta_star == doctest::Approx(0.15 / 0.66).epsilon(1e-9));
    CHECK(std::round(sel.eta_star * 100.0) / 100.0 == doctest::Approx(0.23));
    CHECK_FALSE(sel.used_fallback);
  }
  SUBCASE("symmetric parabola around 0.25") {
    std::vector<EtaPoint> curve;
    for (double e : {0.05, 0.15, 0.25, 0.35, 0.45}) curve.push_back({e, std::pow(e - 0.25, 2) + 1.0});
    CHECK(select_eta(curve).eta_star == doctest::Approx(0.25).epsilon(1e-9));
  }
  SUBCASE("monotone curve clamps to the grid edge") {
    std::vector<EtaPoint> curve;
    for (double e : grid) curve.push_back({e, std::pow(e - 1.0, 2)});
    const auto sel = select_eta(curve);
    CHECK(sel.eta_star == 0.5);
    CHECK_FALSE(sel.used_fallback);
  }
  SUBCASE("flat curve falls back to the grid argmin") {
    std::vector<EtaPoint> curve;
    for (double e : grid) curve.push_back({e, 0.02});
    const auto sel = select_eta(curve);
    CHECK(sel.used_fallback);
    CHECK(sel.eta_star == grid.front());
  }
  SUBCASE("concave curve falls back") {
    std::vector<EtaPoint> curve;
    for (double e : grid) curve.push_back({e, -std::pow(e - 0.3, 2)});
    const auto sel = select_eta(curve);
    CHECK(sel.used_fallback);
    CHECK(sel.eta_star == grid.front());
  }
  SUBCASE("grid validation") {
    std::vector<EtaPoint> few{{0.1, 1}, {0.2, 1}, {0.3, 1}};
    CHECK_THROWS_AS(select_eta(few), ParameterError);
    std::vector<EtaPoint> wide{{0.1, 1}, {0.2, 1}, {0.3, 1}, {0.7, 1}};
    CHECK_THROWS_AS(select_eta(wide), ParameterError);
  }
}

TEST_CASE("tune_eta on drifting noise") {
  const auto model = make_noise_model(5, {0.02, 0.05, 0.5}, 4);
  std::vector<Circuit> train, test;
  for (std::uint64_t i = 0; i < 200; ++i) train.push_back(random_circuit(5, 4, 500 + i));
  for (std::uint64_t i = 0; i < 30; ++i) test.push_back(random_circuit(5, 4, 900 + i));
  const auto grid = default_eta_grid();
  const auto result = tune_eta(model.calibration, train, test, model, grid, {8192, false, 1});
  REQUIRE(result.curve.size() == grid.size());
  CHECK(result.selection.fit.a > 0.0);
  // The regression target is the runtime confusion itself, so mean MSE keeps
  // falling across the grid and the vertex lies beyond it.
  const double vertex = -result.selection.fit.b / (2.0 * result.selection.fit.a);
  CHECK(vertex > 0.5);
  CHECK(result.selection.eta_star == 0.5);
  CHECK(result.curve.back().mse < result.curve.front().mse);
}
