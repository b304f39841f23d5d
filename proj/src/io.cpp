#include "quasidiag/io.hpp"

#include <fstream>
#include <sstream>

namespace quasidiag {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InvalidInput("matrix: expected a non-empty array of rows");
  const Index n = static_cast<Index>(j.size());
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    const Json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Index>(row.size()) != n)
      throw InvalidInput("matrix: rows must form a square array");
    for (Index c = 0; c < n; ++c) {
      const Json& entry = row.at(static_cast<std::size_t>(c));
      if (!entry.is_array() || entry.size() != 2 || !entry.at(0).is_number() ||
          !entry.at(1).is_number())
        throw InvalidInput("matrix: entries must be [re, im] number pairs");
      m(i, c) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
  }
  return m;
}

Json instance_to_json(const WeightedState& g1, const WeightedState& g2, const Json& metadata) {
  Json j;
  j["dim"] = g1.dim();
  j["gamma1"] = matrix_to_json(g1.matrix());
  j["gamma2"] = matrix_to_json(g2.matrix());
  if (!metadata.empty()) j["metadata"] = metadata;
  return j;
}

ParsedInstance parse_instance(const Json& j, const Tolerances& tol) {
  if (!j.is_object()) throw InvalidInput("instance: expected a JSON object");
  const Index dim = j.at("dim").get<Index>();
  Matrix m1 = matrix_from_json(j.at("gamma1"));
  Matrix m2 = matrix_from_json(j.at("gamma2"));
  if (m1.rows() != dim || m2.rows() != dim)
    throw InvalidInput("instance: matrices do not match the declared dimension");
  WeightedState g1(std::move(m1), tol);
  WeightedState g2(std::move(m2), tol);
  if (g1.weight() + g2.weight() > 1.0 + 1e-9)
    throw InvalidInput("instance: traces sum to more than 1");
  Json metadata = j.contains("metadata") ? j.at("metadata") : Json::object();
  return ParsedInstance{std::move(g1), std::move(g2), std::move(metadata)};
}

ParsedInstance load_instance_file(const std::string& path, const Tolerances& tol) {
  std::ifstream in(path);
  if (!in) throw Json::parse_error::create(101, 0, "cannot open file: " + path, nullptr);
  Json j = Json::parse(in);
  return parse_instance(j, tol);
}

Json tolerances_to_json(const Tolerances& tol) {
  return Json{{"tol_herm", tol.tol_herm},
              {"tol_rank", tol.tol_rank},
              {"tol_comm", tol.tol_comm},
              {"tol_psd", tol.tol_psd}};
}

Json criterion_report_to_json(const CriterionReport& r) {
  Json norms;
  for (const auto& [label, value] : r.norms) norms[label] = value;
  return Json{{"criterion", r.criterion_name},
              {"norms", std::move(norms)},
              {"pass", r.pass},
              {"tol_used", r.tol_used},
              {"precondition_ok", r.precondition_ok}};
}

Json reduction_step_to_json(const ReductionStep& s) {
  return Json{{"which", to_string(s.which)},
              {"projector_rank", s.projector_used.rank()},
              {"dim_after", s.embedding.cols()},
              {"trace_gamma1", s.output_pair.first.weight()},
              {"trace_gamma2", s.output_pair.second.weight()}};
}

Json validation_report_to_json(const ValidationReport& v) {
  return Json{{"min_eig_e1", v.min_eig_e1},
              {"min_eig_e2", v.min_eig_e2},
              {"min_eig_fail", v.min_eig_fail},
              {"completeness_residual", v.completeness_residual},
              {"error_trace_12", v.error_trace_12},
              {"error_trace_21", v.error_trace_21},
              {"p_succ", v.p_succ},
              {"pass", v.pass}};
}

std::string dump_json(const Json& j, bool compact) {
  return compact ? j.dump() : j.dump(2);
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write file: " + path);
  out << contents;
}

}  // namespace quasidiag
