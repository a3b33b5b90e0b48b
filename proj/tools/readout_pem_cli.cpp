// readout-pem: calibrate, personalize and evaluate readout error mitigation
// against the built-in drifting readout-noise simulator.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "readout_pem/errors.hpp"
#include "readout_pem/harness.hpp"
#include "readout_pem/serialization.hpp"

namespace fs = std::filesystem;
using namespace readout_pem;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed, shots;
  std::optional<int> n_qubits, depth, n_train, n_test;
  std::optional<double> eta, drift_scale;
  std::optional<std::string> out;
  bool analytic = false;
};

ExperimentConfig load_config(const Overrides& o) {
  ExperimentConfig c =
      o.config_path.empty() ? ExperimentConfig{} : config_from_json(read_json_file(o.config_path));
  if (o.seed) c.master_seed = *o.seed;
  if (o.shots) c.shots = *o.shots;
  if (o.n_qubits) c.n_qubits = *o.n_qubits;
  if (o.depth) c.depth = *o.depth;
  if (o.n_train) c.n_train = *o.n_train;
  if (o.n_test) c.n_test = *o.n_test;
  if (o.eta) c.eta = *o.eta;
  if (o.drift_scale) c.noise.drift_scale = *o.drift_scale;
  if (o.out) c.output_dir = *o.out;
  if (o.analytic) c.analytic = true;
  c.validate();
  return c;
}

std::optional<std::vector<Circuit>> maybe_circuits(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return circuits_from_json(read_json_file(path));
}

void print_metric(const char* name, const MetricSummary& m) {
  std::printf("%-10s median EM %.6g  PEM %.6g  improvement %+.2f%%  PEM wins %.0f%%\n", name,
              m.median_em, m.median_pem, 100.0 * m.improvement, 100.0 * m.win_rate);
}

int cmd_calibrate(const ExperimentConfig& c) {
  const CalibrationBundle bundle = run_calibration(c);
  write_json_file(c.output_dir / "calibration.json", to_json(bundle));
  for (std::size_t q = 0; q < bundle.confusions.size(); ++q) {
    std::printf("qubit %zu: flip01 %.5f flip10 %.5f\n", q, bundle.confusions[q].flip01(),
                bundle.confusions[q].flip10());
  }
  std::printf("wrote %s\n", (c.output_dir / "calibration.json").c_str());
  return 0;
}

int cmd_train(const ExperimentConfig& c, const std::string& circuits_path) {
  const CalibrationBundle bundle = calibration_from_json(read_json_file(c.output_dir / "calibration.json"));
  const TrainingOutcome out = run_training(c, bundle, maybe_circuits(circuits_path));
  write_json_file(c.output_dir / "pem_model.json", to_json(out.model));
  json manifest = {{"master_seed", c.master_seed},
                   {"depth", c.depth},
                   {"eta", c.eta},
                   {"circuits_file", circuits_path},
                   {"circuit_seeds", out.circuit_seeds}};
  write_json_file(c.output_dir / "train_manifest.json", manifest);
  std::printf("wrote %s\n", (c.output_dir / "pem_model.json").c_str());
  return 0;
}

int cmd_evaluate(const ExperimentConfig& c, const std::string& circuits_path) {
  const CalibrationBundle bundle = calibration_from_json(read_json_file(c.output_dir / "calibration.json"));
  const PemModel pem = pem_model_from_json(read_json_file(c.output_dir / "pem_model.json"));
  std::optional<std::vector<Circuit>> circuits = maybe_circuits(circuits_path);
  if (!circuits) circuits = make_circuits(c, "test", c.n_test);

  std::vector<CircuitReport> reports;
  try {
    evaluate_circuits(*circuits, bundle.noise, bundle.mitigation_matrix, pem.mitigation_matrix,
                      test_sampling(c), reports);
  } catch (...) {
    write_text_file(c.output_dir / "eval_report.csv", report_csv(reports));
    throw;
  }
  const EvaluationSummary summary = summarize(reports);
  write_text_file(c.output_dir / "eval_report.csv", report_csv(reports));
  write_json_file(c.output_dir / "eval_summary.json", to_json(summary));
  print_metric("fidelity", summary.fidelity);
  print_metric("mse", summary.mse);
  print_metric("hellinger", summary.hellinger);
  return 0;
}

int cmd_tune(const ExperimentConfig& c, const std::string& curve_path) {
  std::vector<EtaPoint> curve;
  EtaSelection selection;
  if (curve_path.empty()) {
    TuneResult result = run_tuning(c);
    curve = std::move(result.curve);
    selection = result.selection;
  } else {
    curve = eta_curve_from_csv(curve_path);
    selection = select_eta(curve);
  }
  write_text_file(c.output_dir / "eta_curve.csv", eta_curve_csv(curve));
  write_json_file(c.output_dir / "eta_fit.json", to_json(selection));
  if (selection.used_fallback) {
    std::fprintf(stderr, "warning: quadratic fit has no interior minimum; using grid argmin\n");
  }
  std::printf("fit: mse ~ %.4g eta^2 %+.4g eta %+.4g\n", selection.fit.a, selection.fit.b,
              selection.fit.c);
  std::printf("eta_star %.2f\n", selection.eta_star);
  return 0;
}

int cmd_depth_sweep(const ExperimentConfig& c) {
  const auto rows = run_depth_sweep(c);
  write_text_file(c.output_dir / "depth_sweep.csv", depth_sweep_csv(rows));
  for (const auto& row : rows) {
    if (row.summary) {
      std::printf("depth %2d: median MSE EM %.6g PEM %.6g\n", row.depth,
                  row.summary->mse.median_em, row.summary->mse.median_pem);
    } else {
      std::printf("depth %2d: failed: %s\n", row.depth, row.error.c_str());
    }
  }
  return 0;
}

int cmd_gen_dataset(const ExperimentConfig& c) {
  write_json_file(c.output_dir / "circuits" / "train.json",
                  to_json(make_circuits(c, "train", c.n_train)));
  write_json_file(c.output_dir / "circuits" / "test.json",
                  to_json(make_circuits(c, "test", c.n_test)));
  std::printf("wrote %d training and %d test circuits under %s\n", c.n_train, c.n_test,
              (c.output_dir / "circuits").c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalized readout error mitigation experiments"};
  app.require_subcommand(1);

  Overrides o;
  app.add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--n-qubits", o.n_qubits, "number of qubits");
  app.add_option("--depth", o.depth, "circuit depth");
  app.add_option("--n-train", o.n_train, "training circuits");
  app.add_option("--n-test", o.n_test, "test circuits");
  app.add_option("--shots", o.shots, "shots per circuit");
  app.add_option("--eta", o.eta, "learning rate in (0, 1)");
  app.add_option("--drift-scale", o.drift_scale, "runtime drift of the flip rates");
  app.add_option("--out", o.out, "output directory");
  app.add_flag("--analytic", o.analytic, "exact distributions for calibration and training");

  std::string circuits_path, curve_path;
  auto* calibrate = app.add_subcommand("calibrate", "estimate confusions from the calibration circuits");
  auto* train = app.add_subcommand("train", "personalize the readout model on training circuits");
  train->add_option("--circuits", circuits_path, "training circuits JSON (default: generated)");
  auto* evaluate = app.add_subcommand("evaluate", "compare EM and PEM on held-out circuits");
  evaluate->add_option("--circuits", circuits_path, "test circuits JSON (default: generated)");
  auto* tune = app.add_subcommand("tune", "sweep eta and fit a quadratic to mean test MSE");
  tune->add_option("--from-curve", curve_path, "fit an existing eta,mse CSV instead of running");
  auto* sweep = app.add_subcommand("depth-sweep", "calibrate/train/evaluate for depths 1..max");
  auto* gen = app.add_subcommand("gen-dataset", "write seeded train/test circuit datasets");
  for (auto* sub : {calibrate, train, evaluate, tune, sweep, gen}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    const ExperimentConfig c = load_config(o);
    if (*calibrate) return cmd_calibrate(c);
    if (*train) return cmd_train(c, circuits_path);
    if (*evaluate) return cmd_evaluate(c, circuits_path);
    if (*tune) return cmd_tune(c, curve_path);
    if (*sweep) return cmd_depth_sweep(c);
    if (*gen) return cmd_gen_dataset(c);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.category() == ErrorCategory::validation ? kExitValidation : kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitValidation;
}
