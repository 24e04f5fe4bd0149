#include "sg/json_io.hpp"

#include <cmath>
#include <limits>

#include "sg/error.hpp"

namespace sg {

namespace {

Json vector_to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Json matrix_rows_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd matrix_rows_from_json(const Json& j) {
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  return m;
}

}  // namespace

Json to_json(const EffectiveRankReport& report) {
  Json j;
  j["d_star"] = report.d_star;
  // Witness basis as rows (each row one basis vector of the subspace).
  j["witness_basis"] = matrix_rows_to_json(report.witness.basis().transpose());
  j["boundary_equality"] = report.boundary_equality;
  j["checked_subspace_count"] = report.checked_subspace_count;
  return j;
}

Json to_json(const IsotropyTransform& transform) {
  Json j;
  Json flat = Json::array();
  for (Eigen::Index r = 0; r < transform.matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < transform.matrix.cols(); ++c)
      flat.push_back(transform.matrix(r, c));
  j["matrix"] = std::move(flat);
  j["iterations"] = transform.iterations;
  j["residual"] = transform.residual;
  j["converged"] = transform.converged;
  return j;
}

Json to_json(const DirectionSelection& selection) {
  Json j;
  j["M"] = selection.quantile_m;
  j["theta1"] = vector_to_json(selection.theta1.coords());
  j["theta2"] = vector_to_json(selection.theta2.coords());
  j["theta3"] = vector_to_json(selection.theta3.coords());
  j["theta"] = vector_to_json(selection.theta.coords());
  if (std::isinf(selection.t0))
    j["t0"] = nullptr;
  else
    j["t0"] = selection.t0;
  j["cap_prob_1"] = selection.cap_prob_1;
  j["cap_prob_2"] = selection.cap_prob_2;
  j["candidate_count"] = selection.candidate_count;
  j["seed"] = selection.seed;
  return j;
}

Json to_json(const SuperGaussianCertificate& cert, const TailCurve& curve) {
  Json j;
  j["alpha"] = cert.alpha;
  j["beta"] = cert.beta;
  j["L"] = cert.length;
  j["M_med"] = cert.median_abs_value;
  j["pass"] = cert.pass;
  if (cert.failing_t)
    j["failing_t"] = *cert.failing_t;
  else
    j["failing_t"] = nullptr;
  Json grid = Json::array();
  for (std::size_t g = 0; g < curve.t_grid.size(); ++g) {
    Json row;
    row["t"] = curve.t_grid[g];
    row["upper"] = curve.upper[g];
    row["lower"] = curve.lower[g];
    row["ci_lb"] = curve.ci_lower_bounds[g];
    grid.push_back(std::move(row));
  }
  j["grid"] = std::move(grid);
  j["sample_count"] = curve.sample_count;
  return j;
}

Json to_json(const PipelineReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["input_summary"] = {{"n", report.input_summary.n},
                        {"N", report.input_summary.sample_count},
                        {"source", report.input_summary.source}};
  j["seed"] = report.seed;
  j["rank_report"] = report.rank_report ? to_json(*report.rank_report) : Json(nullptr);
  j["projection_basis"] =
      report.projection ? matrix_rows_to_json(report.projection->basis().transpose())
                        : Json(nullptr);
  j["transform"] = to_json(report.transform);
  j["hypothesis_ok"] = report.hypothesis_ok;
  j["hypothesis_override"] = report.hypothesis_override;
  j["selection"] = report.selection ? to_json(*report.selection) : Json(nullptr);
  j["certificate"] = to_json(report.certificate, report.curve);
  j["functional"] = vector_to_json(report.functional);
  Json timings;
  for (const auto& [stage, ms] : report.timings_ms) timings[stage] = ms;
  j["timings_ms"] = std::move(timings);
  return j;
}

UnitVector theta_from_json(const Json& j) {
  if (j.is_array()) return UnitVector(vector_from_json(j));
  if (j.contains("theta")) return UnitVector(vector_from_json(j.at("theta")));
  throw Error("parse-error", "expected an array or an object with a 'theta' key");
}

PipelineReport pipeline_report_from_json(const Json& j) {
  PipelineReport report;
  report.input_summary.n = j.at("input_summary").at("n").get<Eigen::Index>();
  report.input_summary.sample_count = j.at("input_summary").at("N").get<std::size_t>();
  report.input_summary.source = j.at("input_summary").at("source").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();

  if (!j.at("rank_report").is_null()) {
    const Json& r = j.at("rank_report");
    EffectiveRankReport rank;
    rank.d_star = r.at("d_star").get<double>();
    const Eigen::MatrixXd basis_rows = matrix_rows_from_json(r.at("witness_basis"));
    rank.witness = Subspace(basis_rows.cols(), basis_rows.transpose());
    rank.boundary_equality = r.at("boundary_equality").get<bool>();
    rank.checked_subspace_count = r.at("checked_subspace_count").get<std::int64_t>();
    report.rank_report = std::move(rank);
  }

  if (!j.at("projection_basis").is_null()) {
    const Eigen::MatrixXd basis_rows = matrix_rows_from_json(j.at("projection_basis"));
    report.projection = Subspace(basis_rows.cols(), basis_rows.transpose());
  }

  {
    const Json& t = j.at("transform");
    const auto flat = t.at("matrix");
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
    report.transform.matrix.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        report.transform.matrix(r, c) = flat[static_cast<std::size_t>(r * n + c)].get<double>();
    report.transform.iterations = t.at("iterations").get<int>();
    report.transform.residual = t.at("residual").get<double>();
    report.transform.converged = t.at("converged").get<bool>();
  }

  report.hypothesis_ok = j.at("hypothesis_ok").get<bool>();
  report.hypothesis_override = j.at("hypothesis_override").get<bool>();

  if (!j.at("selection").is_null()) {
    const Json& s = j.at("selection");
    report.selection = DirectionSelection(
        s.at("M").get<double>(), UnitVector(vector_from_json(s.at("theta1"))),
        UnitVector(vector_from_json(s.at("theta2"))),
        UnitVector(vector_from_json(s.at("theta3"))),
        UnitVector(vector_from_json(s.at("theta"))), s.at("cap_prob_1").get<double>(),
        s.at("cap_prob_2").get<double>(), s.at("candidate_count").get<std::int64_t>(),
        s.at("seed").get<std::uint64_t>(), SelectionConstants{});
  }

  {
    const Json& c = j.at("certificate");
    report.certificate.alpha = c.at("alpha").get<double>();
    report.certificate.beta = c.at("beta").get<double>();
    report.certificate.length = c.at("L").get<double>();
    report.certificate.median_abs_value = c.at("M_med").get<double>();
    report.certificate.pass = c.at("pass").get<bool>();
    if (!c.at("failing_t").is_null())
      report.certificate.failing_t = c.at("failing_t").get<double>();
    for (const Json& row : c.at("grid")) {
      report.curve.t_grid.push_back(row.at("t").get<double>());
      report.curve.upper.push_back(row.at("upper").get<double>());
      report.curve.lower.push_back(row.at("lower").get<double>());
      report.curve.ci_lower_bounds.push_back(row.at("ci_lb").get<double>());
    }
    report.curve.sample_count = c.at("sample_count").get<std::size_t>();
  }

  report.functional = vector_from_json(j.at("functional"));
  if (j.contains("timings_ms"))
    for (const auto& [stage, ms] : j.at("timings_ms").items())
      report.timings_ms[stage] = ms.get<double>();
  return report;
}

}  // namespace sg
