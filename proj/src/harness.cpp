#include "readout_pem/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "readout_pem/errors.hpp"
#include "readout_pem/seeding.hpp"
#include "readout_pem/serialization.hpp"

namespace readout_pem {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("config: " + what);
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ValidationError("unknown config key '" + where + item.key() + "'");
    }
  }
}

// Relative change of medians, oriented so that positive means PEM is better.
double relative_improvement(double em, double pem, bool larger_is_better) {
  const double delta = larger_is_better ? pem - em : em - pem;
  if (em == 0.0) return delta == 0.0 ? 0.0 : std::copysign(INFINITY, delta);
  return delta / em;
}

MetricSummary summarize_metric(const std::vector<CircuitReport>& reports,
                               double CircuitReport::*em_field,
                               double CircuitReport::*pem_field, bool larger_is_better) {
  std::vector<double> em, pem;
  std::size_t wins = 0;
  for (const auto& r : reports) {
    em.push_back(r.*em_field);
    pem.push_back(r.*pem_field);
    const bool win = larger_is_better ? r.*pem_field > r.*em_field
                                      : r.*pem_field < r.*em_field;
    wins += win ? 1 : 0;
  }
  MetricSummary s;
  s.median_em = median(em);
  s.median_pem = median(pem);
  s.improvement = relative_improvement(s.median_em, s.median_pem, larger_is_better);
  s.win_rate = reports.empty() ? 0.0
                               : static_cast<double>(wins) / static_cast<double>(reports.size());
  return s;
}

json metric_json(const MetricSummary& m) {
  return {{"median_em", m.median_em},
          {"median_pem", m.median_pem},
          {"improvement", m.improvement},
          {"win_rate", m.win_rate}};
}

std::string csv_escape(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '"') c = ' ';
  }
  return s;
}

}  // namespace

void ExperimentConfig::validate() const {
  require(n_qubits >= 1 && n_qubits <= 12, "n_qubits must be in [1, 12]");
  require(depth >= 1, "depth must be >= 1");
  require(n_train >= 2, "n_train must be >= 2");
  require(n_test >= 1, "n_test must be >= 1");
  require(shots >= 1, "shots must be >= 1");
  require(eta > 0.0 && eta < 1.0, "eta must lie in (0, 1)");
  require(tune_n_train >= 2 && tune_n_test >= 1, "tune sizes must be positive");
  require(sweep_n_train >= 2 && sweep_n_test >= 1, "sweep sizes must be positive");
  require(sweep_max_depth >= 1, "sweep max_depth must be >= 1");
  require(eta_grid.size() >= 4, "eta_grid needs at least four values");
  for (double e : eta_grid) require(e > 0.0 && e <= 0.5, "eta_grid values must lie in (0, 0.5]");
  require(noise.base_eps01 > 0.0 && noise.base_eps01 < 0.5 && noise.base_eps10 > 0.0 &&
              noise.base_eps10 < 0.5,
          "base flip rates must lie in (0, 0.5)");
  require(noise.drift_scale >= 0.0 && noise.drift_scale <= 1.0, "drift_scale must lie in [0, 1]");
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  reject_unknown(j,
                 {"n_qubits", "depth", "n_train", "n_test", "shots", "eta", "noise",
                  "master_seed", "analytic", "output_dir", "tune", "sweep"},
                 "");
  ExperimentConfig c;
  read_key(j, "n_qubits", c.n_qubits);
  read_key(j, "depth", c.depth);
  read_key(j, "n_train", c.n_train);
  read_key(j, "n_test", c.n_test);
  read_key(j, "shots", c.shots);
  read_key(j, "eta", c.eta);
  read_key(j, "master_seed", c.master_seed);
  read_key(j, "analytic", c.analytic);
  std::string out_dir = c.output_dir.string();
  read_key(j, "output_dir", out_dir);
  c.output_dir = out_dir;
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    reject_unknown(n, {"base_eps01", "base_eps10", "drift_scale"}, "noise.");
    read_key(n, "base_eps01", c.noise.base_eps01);
    read_key(n, "base_eps10", c.noise.base_eps10);
    read_key(n, "drift_scale", c.noise.drift_scale);
  }
  if (j.contains("tune")) {
    const json& t = j.at("tune");
    reject_unknown(t, {"n_train", "n_test", "grid"}, "tune.");
    read_key(t, "n_train", c.tune_n_train);
    read_key(t, "n_test", c.tune_n_test);
    read_key(t, "grid", c.eta_grid);
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    reject_unknown(s, {"n_train", "n_test", "max_depth"}, "sweep.");
    read_key(s, "n_train", c.sweep_n_train);
    read_key(s, "n_test", c.sweep_n_test);
    read_key(s, "max_depth", c.sweep_max_depth);
  }
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  return {{"n_qubits", c.n_qubits},
          {"depth", c.depth},
          {"n_train", c.n_train},
          {"n_test", c.n_test},
          {"shots", c.shots},
          {"eta", c.eta},
          {"noise",
           {{"base_eps01", c.noise.base_eps01},
            {"base_eps10", c.noise.base_eps10},
            {"drift_scale", c.noise.drift_scale}}},
          {"master_seed", c.master_seed},
          {"analytic", c.analytic},
          {"output_dir", c.output_dir.string()},
          {"tune", {{"n_train", c.tune_n_train}, {"n_test", c.tune_n_test}, {"grid", c.eta_grid}}},
          {"sweep",
           {{"n_train", c.sweep_n_train},
            {"n_test", c.sweep_n_test},
            {"max_depth", c.sweep_max_depth}}}};
}

SamplingOptions training_sampling(const ExperimentConfig& config) {
  return {config.shots, config.analytic, derive_seed(config.master_seed, "train-shots")};
}

SamplingOptions test_sampling(const ExperimentConfig& config) {
  // Test circuits model the experimental measurement and are always sampled.
  return {config.shots, false, derive_seed(config.master_seed, "test-shots")};
}

std::uint64_t train_circuit_seed(std::uint64_t master, std::size_t i) {
  return derive_seed(master, "train", i);
}

std::uint64_t test_circuit_seed(std::uint64_t master, std::size_t i) {
  return derive_seed(master, "test", i);
}

std::vector<Circuit> make_circuits(const ExperimentConfig& config, const char* split,
                                   int count) {
  std::vector<Circuit> circuits;
  circuits.reserve(count);
  for (int i = 0; i < count; ++i) {
    circuits.push_back(random_circuit(config.n_qubits, config.depth,
                                      derive_seed(config.master_seed, split, i)));
  }
  return circuits;
}

CalibrationBundle run_calibration(const ExperimentConfig& config) {
  config.validate();
  NoiseModel noise = make_noise_model(config.n_qubits, config.noise,
                                      derive_seed(config.master_seed, "noise"));
  const auto zeros_ideal = simulate(circuit_all_zeros(config.n_qubits));
  const auto ones_ideal = simulate(circuit_all_ones(config.n_qubits));
  const auto zeros = noisy_distribution(zeros_ideal, noise, NoiseSet::calibration);
  const auto ones = noisy_distribution(ones_ideal, noise, NoiseSet::calibration);

  std::vector<ConfusionMatrix> confusions =
      config.analytic
          ? estimate_confusions(zeros, ones)
          : estimate_confusions(
                sample_shots(zeros, config.shots, derive_seed(config.master_seed, "calibrate", 0)),
                sample_shots(ones, config.shots, derive_seed(config.master_seed, "calibrate", 1)));
  ErrorMatrix em = assemble_error_matrix(confusions);
  MitigationMatrix mm = invert_error_matrix(em);
  return CalibrationBundle{std::move(noise), config.shots, config.analytic,
                           std::move(confusions), std::move(em), std::move(mm)};
}

json to_json(const CalibrationBundle& b) {
  return {{"n_qubits", b.noise.n_qubits},
          {"shots", b.shots},
          {"analytic", b.analytic},
          {"noise_model", to_json(b.noise)},
          {"confusions", to_json(b.confusions)},
          {"error_matrix", to_json(b.error_matrix)},
          {"mitigation_matrix", to_json(b.mitigation_matrix)}};
}

CalibrationBundle calibration_from_json(const json& j) {
  try {
    NoiseModel noise = noise_model_from_json(j.at("noise_model"));
    auto confusions = confusions_from_json(j.at("confusions"));
    ErrorMatrix em = error_matrix_from_json(j.at("error_matrix"));
    if (!(assemble_error_matrix(confusions) == em)) {
      throw ValidationError("calibration error matrix does not match its confusions");
    }
    MitigationMatrix mm = mitigation_matrix_from_json(j.at("mitigation_matrix"), em);
    return CalibrationBundle{std::move(noise), j.at("shots").get<std::uint64_t>(),
                             j.at("analytic").get<bool>(), std::move(confusions),
                             std::move(em), std::move(mm)};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed calibration bundle: ") + e.what());
  }
}

TrainingOutcome run_training(const ExperimentConfig& config, const CalibrationBundle& bundle,
                             std::optional<std::vector<Circuit>> circuits) {
  config.validate();
  if (bundle.noise.n_qubits != config.n_qubits) {
    throw DimensionError("config and calibration disagree on qubit count");
  }
  std::vector<std::uint64_t> seeds;
  if (!circuits) {
    for (int i = 0; i < config.n_train; ++i) {
      seeds.push_back(train_circuit_seed(config.master_seed, i));
    }
    circuits = make_circuits(config, "train", config.n_train);
  }
  PemModel model = train_pem(bundle.confusions, *circuits, bundle.noise, config.eta,
                             training_sampling(config));
  return TrainingOutcome{std::move(model), std::move(seeds)};
}

double median(std::vector<double> values) {
  if (values.empty()) return NAN;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

EvaluationSummary summarize(const std::vector<CircuitReport>& reports) {
  EvaluationSummary s;
  s.circuits = reports.size();
  s.fidelity = summarize_metric(reports, &CircuitReport::fidelity_em,
                                &CircuitReport::fidelity_pem, true);
  s.mse = summarize_metric(reports, &CircuitReport::mse_em, &CircuitReport::mse_pem, false);
  s.hellinger = summarize_metric(reports, &CircuitReport::hellinger_em,
                                 &CircuitReport::hellinger_pem, false);
  return s;
}

void evaluate_circuits(std::span<const Circuit> circuits, const NoiseModel& noise,
                       const MitigationMatrix& em, const MitigationMatrix& pem,
                       const SamplingOptions& sampling,
                       std::vector<CircuitReport>& reports) {
  reports.clear();
  const std::size_t count = circuits.size();
  std::vector<std::optional<CircuitReport>> slots(count);
  std::exception_ptr failure;
  try {
    // Only the measurement is shared; each circuit's metrics are independent.
    const CircuitData data = collect_circuit_data(circuits, noise, NoiseSet::runtime, sampling);
    for (std::size_t i = 0; i < count; ++i) {
      const auto& p = data.ideal[i];
      const auto mitigated_em = mitigate(data.measured[i], em);
      const auto mitigated_pem = mitigate(data.measured[i], pem);
      slots[i] = CircuitReport{i,
                               fidelity(p, mitigated_em),
                               fidelity(p, mitigated_pem),
                               mse(p, mitigated_em),
                               mse(p, mitigated_pem),
                               hellinger(p, mitigated_em),
                               hellinger(p, mitigated_pem)};
    }
  } catch (...) {
    failure = std::current_exception();
  }
  for (auto& slot : slots) {
    if (!slot) break;
    reports.push_back(*slot);
  }
  if (failure) std::rethrow_exception(failure);
}

EvaluationOutcome run_evaluation(const ExperimentConfig& config,
                                 const CalibrationBundle& bundle, const PemModel& pem,
                                 std::optional<std::vector<Circuit>> circuits) {
  config.validate();
  if (bundle.noise.n_qubits != config.n_qubits ||
      pem.mitigation_matrix.n_qubits() != config.n_qubits) {
    throw DimensionError("config, calibration and PEM model disagree on qubit count");
  }
  if (!circuits) circuits = make_circuits(config, "test", config.n_test);
  EvaluationOutcome out;
  evaluate_circuits(*circuits, bundle.noise, bundle.mitigation_matrix, pem.mitigation_matrix,
                    test_sampling(config), out.reports);
  out.summary = summarize(out.reports);
  return out;
}

TuneResult run_tuning(const ExperimentConfig& config) {
  config.validate();
  const CalibrationBundle bundle = run_calibration(config);
  // Tuning circuits are drawn from their own seed streams so the evaluation
  // test set stays unseen.
  const auto train = make_circuits(config, "tune-train", config.tune_n_train);
  const auto test = make_circuits(config, "tune-test", config.tune_n_test);
  return tune_eta(bundle.confusions, train, test, bundle.noise, config.eta_grid,
                  {config.shots, config.analytic, derive_seed(config.master_seed, "tune")});
}

std::vector<DepthRow> run_depth_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<DepthRow> rows;
  for (int depth = 1; depth <= config.sweep_max_depth; ++depth) {
    ExperimentConfig c = config;
    c.depth = depth;
    c.n_train = config.sweep_n_train;
    c.n_test = config.sweep_n_test;
    c.master_seed = derive_seed(config.master_seed, "depth", depth);
    DepthRow row{depth, std::nullopt, {}};
    try {
      const CalibrationBundle bundle = run_calibration(c);
      const TrainingOutcome trained = run_training(c, bundle);
      row.summary = run_evaluation(c, bundle, trained.model).summary;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string report_csv(const std::vector<CircuitReport>& reports) {
  std::ostringstream out;
  out << "circuit_id,fidelity_em,fidelity_pem,mse_em,mse_pem,hellinger_em,hellinger_pem\n";
  for (const auto& r : reports) {
    out << r.circuit_id << ',' << fmt_double(r.fidelity_em) << ','
        << fmt_double(r.fidelity_pem) << ',' << fmt_double(r.mse_em) << ','
        << fmt_double(r.mse_pem) << ',' << fmt_double(r.hellinger_em) << ','
        << fmt_double(r.hellinger_pem) << '\n';
  }
  return out.str();
}

json to_json(const EvaluationSummary& s) {
  return {{"circuits", s.circuits},
          {"fidelity", metric_json(s.fidelity)},
          {"mse", metric_json(s.mse)},
          {"hellinger", metric_json(s.hellinger)}};
}

std::string eta_curve_csv(const std::vector<EtaPoint>& curve) {
  std::ostringstream out;
  out << "eta,mean_mse\n";
  for (const auto& p : curve) out << fmt_double(p.eta) << ',' << fmt_double(p.mse) << '\n';
  return out.str();
}

json to_json(const EtaSelection& s) {
  return {{"a", s.fit.a},
          {"b", s.fit.b},
          {"c", s.fit.c},
          {"eta_star", s.eta_star},
          {"eta_star_2dp", std::round(s.eta_star * 100.0) / 100.0},
          {"used_fallback", s.used_fallback}};
}

std::string depth_sweep_csv(const std::vector<DepthRow>& rows) {
  std::ostringstream out;
  out << "depth,fidelity_em,fidelity_pem,mse_em,mse_pem,hellinger_em,hellinger_pem,"
         "fidelity_improvement,mse_improvement,hellinger_improvement,error\n";
  for (const auto& row : rows) {
    out << row.depth;
    if (row.summary) {
      const auto& s = *row.summary;
      for (double v : {s.fidelity.median_em, s.fidelity.median_pem, s.mse.median_em,
                       s.mse.median_pem, s.hellinger.median_em, s.hellinger.median_pem,
                       s.fidelity.improvement, s.mse.improvement, s.hellinger.improvement}) {
        out << ',' << fmt_double(v);
      }
      out << ",\n";
    } else {
      out << ",,,,,,,,,," << csv_escape(row.error) << '\n';
    }
  }
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("failed writing " + path.string());
}

std::vector<EtaPoint> eta_curve_from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::vector<EtaPoint> curve;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.find_first_of("0123456789") != 0) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("bad eta curve line: " + line);
    try {
      curve.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    } catch (const std::exception&) {
      throw ValidationError("bad eta curve line: " + line);
    }
  }
  return curve;
}

}  // namespace readout_pem
