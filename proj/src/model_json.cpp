#include "cpca/model_json.hpp"

#include <json.hpp>

namespace cpca {

namespace {

using json = nlohmann::ordered_json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, std::size_t expect_cols = SIZE_MAX) {
  const std::size_t rows = j.size();
  std::size_t cols = rows ? j.at(0).size() : (expect_cols == SIZE_MAX ? 0 : expect_cols);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = j.at(i);
    if (row.size() != cols) throw InvalidInput("model json: ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = row.at(c).get<double>();
  }
  return m;
}

}  // namespace

std::string model_to_json(const CpcaModel& model, const std::string& meta_command,
                          std::uint64_t seed) {
  json doc;
  doc["version"] = "0.1.0";
  doc["command"] = meta_command;
  doc["seed"] = seed;
  doc["variant"] = model.variant;
  doc["n"] = model.g.rows();
  doc["r_c"] = model.r_c;
  doc["column_ids"] = model.column_ids;
  doc["means"] = model.means;
  doc["phi"] = matrix_to_json(model.phi);

  json clusters = json::array();
  for (const auto& c : model.clusters) {
    json jc;
    jc["members"] = c.members;
    jc["r"] = c.r;
    jc["sigma2"] = c.sigma2;
    jc["gamma"] = matrix_to_json(c.gamma);
    clusters.push_back(std::move(jc));
  }
  doc["clusters"] = std::move(clusters);

  json trace;
  trace["iterations"] = model.trace.iterations;
  trace["converged"] = model.trace.converged;
  trace["ari"] = model.trace.ari;
  trace["clusters_per_iter"] = model.trace.clusters_per_iter;
  trace["rc_per_iter"] = model.trace.rc_per_iter;
  trace["partitions"] = model.trace.partitions;
  doc["trace"] = std::move(trace);

  return doc.dump(2) + "\n";
}

CpcaModel model_from_json(const std::string& text) {
  json doc = json::parse(text);
  CpcaModel m;
  m.variant = doc.value("variant", "cpca_f");
  m.r_c = doc.at("r_c").get<std::size_t>();
  m.column_ids = doc.at("column_ids").get<std::vector<std::string>>();
  m.means = doc.at("means").get<Vector>();
  m.phi = matrix_from_json(doc.at("phi"));
  if (m.phi.rows() == 0) m.phi = Matrix(m.means.size(), 0);

  std::vector<std::size_t> labels(m.means.size(), 0);
  std::size_t id = 0;
  for (const auto& jc : doc.at("clusters")) {
    ++id;
    ClusterComponents cc;
    cc.members = jc.at("members").get<std::vector<std::size_t>>();
    cc.r = jc.at("r").get<std::size_t>();
    cc.sigma2 = jc.at("sigma2").get<double>();
    cc.gamma = matrix_from_json(jc.at("gamma"));
    for (std::size_t mcol : cc.members) labels.at(mcol) = id;
    m.clusters.push_back(std::move(cc));
  }
  m.partition = compact_partition(labels);

  if (doc.contains("trace")) {
    const auto& t = doc.at("trace");
    m.trace.iterations = t.value("iterations", std::size_t{0});
    m.trace.converged = t.value("converged", true);
    m.trace.ari = t.value("ari", Vector{});
  }
  return m;
}

}  // namespace cpca
