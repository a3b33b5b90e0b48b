#include "readout_pem/serialization.hpp"

#include <fstream>

#include "readout_pem/errors.hpp"

namespace readout_pem {

namespace {

template <typename F>
auto parse_field(const char* what, F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

json to_json(const ProbabilityDistribution& dist) {
  return {{"n_qubits", dist.n_qubits()},
          {"values", std::vector<double>(dist.values().begin(), dist.values().end())}};
}

ProbabilityDistribution distribution_from_json(const json& j) {
  return parse_field("distribution", [&] {
    return ProbabilityDistribution(j.at("n_qubits").get<int>(),
                                   j.at("values").get<std::vector<double>>());
  });
}

json to_json(const Circuit& circuit) {
  json layers = json::array();
  for (const Layer& layer : circuit.layers()) {
    json gates = json::array();
    for (const Gate& g : layer) {
      json gate = {{"kind", std::string(to_string(g.kind))}, {"targets", g.targets}};
      if (g.kind == GateKind::RY) gate["theta"] = g.theta;
      gates.push_back(std::move(gate));
    }
    layers.push_back(std::move(gates));
  }
  return {{"n_qubits", circuit.n_qubits()}, {"depth", circuit.depth()}, {"layers", layers}};
}

Circuit circuit_from_json(const json& j) {
  return parse_field("circuit", [&] {
    std::vector<Layer> layers;
    for (const json& jl : j.at("layers")) {
      Layer layer;
      for (const json& jg : jl) {
        Gate g;
        g.kind = gate_kind_from_string(jg.at("kind").get<std::string>());
        g.targets = jg.at("targets").get<std::vector<int>>();
        g.theta = jg.value("theta", 0.0);
        layer.push_back(std::move(g));
      }
      layers.push_back(std::move(layer));
    }
    return Circuit(j.at("n_qubits").get<int>(), std::move(layers),
                   j.at("depth").get<int>());
  });
}

json to_json(const std::vector<Circuit>& circuits) {
  json arr = json::array();
  for (const Circuit& c : circuits) arr.push_back(to_json(c));
  return arr;
}

std::vector<Circuit> circuits_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("circuit dataset must be a JSON array");
  std::vector<Circuit> out;
  for (const json& c : j) out.push_back(circuit_from_json(c));
  return out;
}

json to_json(const ConfusionMatrix& q) {
  const auto& e = q.entries();
  return json::array({json::array({e[0][0], e[0][1]}), json::array({e[1][0], e[1][1]})});
}

ConfusionMatrix confusion_from_json(const json& j) {
  return parse_field("confusion matrix", [&] {
    Matrix2 m{};
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) m[r][c] = j.at(r).at(c).get<double>();
    }
    return ConfusionMatrix(m);
  });
}

json to_json(const std::vector<ConfusionMatrix>& qs) {
  json arr = json::array();
  for (const auto& q : qs) arr.push_back(to_json(q));
  return arr;
}

std::vector<ConfusionMatrix> confusions_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("confusion list must be a JSON array");
  std::vector<ConfusionMatrix> out;
  for (const json& q : j) out.push_back(confusion_from_json(q));
  return out;
}

json to_json(const NoiseModel& model) {
  return {{"n_qubits", model.n_qubits},
          {"calibration", to_json(model.calibration)},
          {"runtime", to_json(model.runtime)}};
}

NoiseModel noise_model_from_json(const json& j) {
  return parse_field("noise model", [&] {
    return NoiseModel(j.at("n_qubits").get<int>(), confusions_from_json(j.at("calibration")),
                      confusions_from_json(j.at("runtime")));
  });
}

json matrix_to_json(int n_qubits, const DenseMatrix& m) {
  return {{"n_qubits", n_qubits},
          {"entries", std::vector<double>(m.data().begin(), m.data().end())}};
}

json to_json(const ErrorMatrix& em) { return matrix_to_json(em.n_qubits(), em.entries()); }

namespace {

std::pair<int, DenseMatrix> square_from_json(const json& j) {
  const int n = j.at("n_qubits").get<int>();
  const std::size_t dim = state_count(n);
  return {n, DenseMatrix(dim, dim, j.at("entries").get<std::vector<double>>())};
}

}  // namespace

ErrorMatrix error_matrix_from_json(const json& j) {
  return parse_field("error matrix", [&] {
    auto [n, m] = square_from_json(j);
    return ErrorMatrix(n, std::move(m));
  });
}

json to_json(const MitigationMatrix& mm) {
  return matrix_to_json(mm.n_qubits(), mm.entries());
}

MitigationMatrix mitigation_matrix_from_json(const json& j, const ErrorMatrix& source) {
  return parse_field("mitigation matrix", [&] {
    auto [n, m] = square_from_json(j);
    if (n != source.n_qubits()) {
      throw DimensionError("mitigation matrix does not match its error matrix");
    }
    return MitigationMatrix::from_inverse(source, std::move(m));
  });
}

json to_json(const PemModel& model) {
  return {{"eta", model.eta},
          {"confusions", to_json(model.updated_confusions)},
          {"error_matrix", to_json(model.error_matrix)},
          {"mitigation_matrix", to_json(model.mitigation_matrix)}};
}

PemModel pem_model_from_json(const json& j) {
  return parse_field("PEM model", [&] {
    auto confusions = confusions_from_json(j.at("confusions"));
    ErrorMatrix em = error_matrix_from_json(j.at("error_matrix"));
    if (!(assemble_error_matrix(confusions) == em)) {
      throw ValidationError("PEM error matrix does not match its confusions");
    }
    MitigationMatrix mm = mitigation_matrix_from_json(j.at("mitigation_matrix"), em);
    return PemModel{j.at("eta").get<double>(), std::move(confusions), std::move(em),
                    std::move(mm)};
  });
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw ValidationError("failed writing " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace readout_pem
