#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "readout_pem/circuit.hpp"
#include "readout_pem/mitigation.hpp"
#include "readout_pem/noise.hpp"
#include "readout_pem/pem.hpp"
#include "readout_pem/prob.hpp"

namespace readout_pem {

using json = nlohmann::json;

// {"n_qubits": n, "values": [...]}
json to_json(const ProbabilityDistribution& dist);
ProbabilityDistribution distribution_from_json(const json& j);

// {"n_qubits": n, "depth": d, "layers": [[{"kind", "targets", "theta"?}]]}
json to_json(const Circuit& circuit);
Circuit circuit_from_json(const json& j);
json to_json(const std::vector<Circuit>& circuits);
std::vector<Circuit> circuits_from_json(const json& j);

json to_json(const ConfusionMatrix& q);  // [[f, f], [f, f]]
ConfusionMatrix confusion_from_json(const json& j);
json to_json(const std::vector<ConfusionMatrix>& qs);
std::vector<ConfusionMatrix> confusions_from_json(const json& j);

// {"n_qubits": n, "calibration": [...], "runtime": [...]}
json to_json(const NoiseModel& model);
NoiseModel noise_model_from_json(const json& j);

// {"n_qubits": n, "entries": [row-major flat]}
json matrix_to_json(int n_qubits, const DenseMatrix& m);
json to_json(const ErrorMatrix& em);
ErrorMatrix error_matrix_from_json(const json& j);
json to_json(const MitigationMatrix& mm);
/// Re-checks the residual against `source`.
MitigationMatrix mitigation_matrix_from_json(const json& j, const ErrorMatrix& source);

// {"eta", "confusions", "error_matrix", "mitigation_matrix"}
json to_json(const PemModel& model);
PemModel pem_model_from_json(const json& j);

/// Writes `j` pretty-printed with a trailing newline. Throws ValidationError
/// on I/O failure.
void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path);

}  // namespace readout_pem
