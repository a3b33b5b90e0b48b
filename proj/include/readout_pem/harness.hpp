#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "readout_pem/circuit.hpp"
#include "readout_pem/mitigation.hpp"
#include "readout_pem/noise.hpp"
#include "readout_pem/pem.hpp"

namespace readout_pem {

struct ExperimentConfig {
  int n_qubits = 7;
  int depth = 4;
  int n_train = 1000;
  int n_test = 100;
  std::uint64_t shots = 8192;
  double eta = 0.23;
  NoiseParameters noise;
  std::uint64_t master_seed = 0;
  // Calibration and training use exact noisy distributions; test
  // measurements are still sampled.
  bool analytic = false;
  std::filesystem::path output_dir = "out";

  // tune
  int tune_n_train = 400;
  int tune_n_test = 50;
  std::vector<double> eta_grid = default_eta_grid();

  // depth-sweep
  int sweep_n_train = 400;
  int sweep_n_test = 50;
  int sweep_max_depth = 10;

  /// Throws ValidationError on out-of-range values.
  void validate() const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

/// Training shots follow `analytic`; test measurements are always sampled.
SamplingOptions training_sampling(const ExperimentConfig& config);
SamplingOptions test_sampling(const ExperimentConfig& config);

std::uint64_t train_circuit_seed(std::uint64_t master, std::size_t i);
std::uint64_t test_circuit_seed(std::uint64_t master, std::size_t i);
std::vector<Circuit> make_circuits(const ExperimentConfig& config, const char* split,
                                   int count);

struct CalibrationBundle {
  NoiseModel noise;
  std::uint64_t shots = 0;
  bool analytic = false;
  std::vector<ConfusionMatrix> confusions;
  ErrorMatrix error_matrix;
  MitigationMatrix mitigation_matrix;
};

CalibrationBundle run_calibration(const ExperimentConfig& config);
nlohmann::json to_json(const CalibrationBundle& bundle);
CalibrationBundle calibration_from_json(const nlohmann::json& j);

struct TrainingOutcome {
  PemModel model;
  std::vector<std::uint64_t> circuit_seeds;  // empty when circuits came from a file
};

TrainingOutcome run_training(const ExperimentConfig& config,
                             const CalibrationBundle& bundle,
                             std::optional<std::vector<Circuit>> circuits = std::nullopt);

struct CircuitReport {
  std::size_t circuit_id = 0;
  double fidelity_em = 0, fidelity_pem = 0;
  double mse_em = 0, mse_pem = 0;
  double hellinger_em = 0, hellinger_pem = 0;
};

struct MetricSummary {
  double median_em = 0;
  double median_pem = 0;
  double improvement = 0;  // relative, in the "better" direction
  double win_rate = 0;     // fraction of circuits where PEM is strictly better
};

struct EvaluationSummary {
  std::size_t circuits = 0;
  MetricSummary fidelity, mse, hellinger;
};

double median(std::vector<double> values);
EvaluationSummary summarize(const std::vector<CircuitReport>& reports);

/// Per-circuit metrics for EM and PEM on the given test circuits. Circuits
/// are measured through the runtime noise with `sampling`. On failure the
/// rows completed before the first failing circuit are left in `reports`
/// and the error is rethrown.
void evaluate_circuits(std::span<const Circuit> circuits, const NoiseModel& noise,
                       const MitigationMatrix& em, const MitigationMatrix& pem,
                       const SamplingOptions& sampling,
                       std::vector<CircuitReport>& reports);

struct EvaluationOutcome {
  std::vector<CircuitReport> reports;
  EvaluationSummary summary;
};

EvaluationOutcome run_evaluation(const ExperimentConfig& config,
                                 const CalibrationBundle& bundle, const PemModel& pem,
                                 std::optional<std::vector<Circuit>> circuits = std::nullopt);

TuneResult run_tuning(const ExperimentConfig& config);

struct DepthRow {
  int depth = 0;
  std::optional<EvaluationSummary> summary;
  std::string error;
};

std::vector<DepthRow> run_depth_sweep(const ExperimentConfig& config);

// File writers. Every output is a deterministic function of its inputs.
std::string report_csv(const std::vector<CircuitReport>& reports);
nlohmann::json to_json(const EvaluationSummary& summary);
std::string eta_curve_csv(const std::vector<EtaPoint>& curve);
nlohmann::json to_json(const EtaSelection& selection);
std::string depth_sweep_csv(const std::vector<DepthRow>& rows);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::vector<EtaPoint> eta_curve_from_csv(const std::filesystem::path& path);

}  // namespace readout_pem
