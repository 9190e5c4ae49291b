#include "gcs/report_io.hpp"

#include <cmath>
#include <ostream>

#include "gcs/integrate.hpp"

namespace gcs {

using nlohmann::json;

json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json json_vector(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(json_number(v[i]));
  return a;
}

json json_matrix(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(json_vector(m.row(i).transpose()));
  return a;
}

json to_json(const Witness& w) {
  return {{"a", json_vector(w.a)},
          {"b", json_vector(w.b)},
          {"t1", json_number(w.t1)},
          {"t2", json_number(w.t2)},
          {"observed", json_number(w.observed)},
          {"bound", json_number(w.bound)}};
}

json to_json(const GcsCertificateReport& r) {
  json j = {{"kind", to_string(r.kind)},
            {"norm", r.norm},
            {"tau", json_number(r.tau)},
            {"epsilon", json_number(r.epsilon)},
            {"verdict", to_string(r.verdict)},
            {"rate", json_number(r.rate)},
            {"worst_margin", json_number(r.worst_margin)},
            {"seed", r.seed},
            {"pairs_checked", r.pairs_checked},
            {"comparisons", r.comparisons}};
  j["witness"] = r.witness ? to_json(*r.witness) : json(nullptr);
  return j;
}

json to_json(const SweReport& r) {
  return {{"kind", "SWE"},
          {"delta", json_number(r.delta)},
          {"horizon", json_number(r.horizon)},
          {"tau0", json_number(r.tau0)},
          {"lipschitz", json_number(r.lipschitz)},
          {"gronwall_tau0", json_number(r.gronwall_tau0)},
          {"max_amplification", json_number(r.max_amplification)},
          {"verdict", to_string(r.verdict)},
          {"seed", r.seed}};
}

json to_json(const EntrainmentReport& r) {
  json res = json::array();
  for (double v : r.residuals) res.push_back(json_number(v));
  json finals = json::array();
  for (const auto& x : r.final_states) finals.push_back(json_vector(x));
  return {{"kind", "Entrainment"},
          {"period", json_number(r.period)},
          {"residuals", res},
          {"max_residual", json_number(r.max_residual)},
          {"orbit_spread", json_number(r.orbit_spread)},
          {"final_states", finals},
          {"verdict", to_string(r.verdict)}};
}

json to_json(const GridSupResult& r) {
  return {{"grid_sup_mu", json_number(r.value)},
          {"argmax", json_vector(r.argmax)},
          {"t", json_number(r.t)},
          {"points", r.points}};
}

json to_json(const PartitionReport& r) {
  json viol = json::array();
  for (const auto& v : r.violations) {
    viol.push_back({{"condition", v.condition},
                    {"index", v.index + 1},
                    {"point", json_vector(v.point)},
                    {"t", json_number(v.t)},
                    {"value", json_number(v.value)}});
  }
  json z = json::object();
  for (const auto& [i, k] : r.zmap) z[std::to_string(i + 1)] = k + 1;
  return {{"verdict", to_string(r.verdict)},
          {"condition1", r.cond1},
          {"condition2", r.cond2},
          {"condition3", r.cond3},
          {"delta", json_number(r.delta)},
          {"max_s0", json_number(r.max_s0)},
          {"zmap", z},
          {"violations", viol}};
}

json to_json(const ScalingResult& r) {
  json j = {{"norm", r.tag == NormTag::L1 ? "l1" : "linf"},
            {"D", json_vector(r.d)},
            {"epsilon_used", json_number(r.epsilon_used)},
            {"delta", json_number(r.delta)},
            {"grid_sup_mu", json_number(r.grid_sup_mu)},
            {"argmax", json_vector(r.argmax)},
            {"verdict", to_string(r.verdict)},
            {"partition", to_json(r.partition)}};
  j["similarity"] = r.similarity ? json_matrix(*r.similarity) : json(nullptr);
  return j;
}

json to_json(const NestedReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"zeta", json_number(row.zeta)},
                    {"grid_sup_mu", json_number(row.grid_sup_mu)},
                    {"deviation", json_number(row.deviation)},
                    {"from_entry", row.from_entry}});
  }
  json entry = json::array();
  for (const auto& [tau, zeta] : r.entry) entry.push_back({{"tau", json_number(tau)}, {"zeta", json_number(zeta)}});
  return {{"verdict", to_string(r.verdict)},
          {"measure_ok", r.measure_ok},
          {"deviation_ok", r.deviation_ok},
          {"entry_ok", r.entry_ok},
          {"rows", rows},
          {"entry", entry},
          {"diagnostic", r.diagnostic}};
}

json to_json(const IcReport& r) {
  json faces = json::array();
  for (const auto& f : r.critical_faces) faces.push_back({{"axis", f.axis + 1}, {"side", f.upper ? "upper" : "lower"}});
  json dist = json::array();
  for (const auto& [tau, d] : r.distance) dist.push_back({{"tau", json_number(tau)}, {"d", json_number(d)}});
  return {{"verdict", to_string(r.verdict)},
          {"interior_sup_mu", json_number(r.interior_sup_mu)},
          {"interior_ok", r.interior_ok},
          {"critical_faces", faces},
          {"distance", dist},
          {"repulsion_ok", r.repulsion_ok},
          {"distance_monotone", r.distance_monotone},
          {"boundary_samples", r.boundary_samples},
          {"note", "boundary repulsion checked on sampled boundary points and sampled tau"}};
}

json to_json(const EquilibriumReport& r) {
  return {{"e", json_vector(r.e)},
          {"residual", json_number(r.residual)},
          {"interior", r.interior},
          {"spread", json_number(r.spread)},
          {"starts", r.starts}};
}

json to_json(const FinslerReport& r) {
  json rates = json::array();
  for (double v : r.rates) rates.push_back(json_number(v));
  return {{"verdict", to_string(r.verdict)},
          {"rate", json_number(r.rate)},
          {"worst_margin", json_number(r.worst_margin)},
          {"rates", rates},
          {"comparisons", r.comparisons}};
}

void write_margin_table(std::ostream& out, const SystemModel& model, const NormKind& norm, const GridSpec& grid,
                        const Domain& region, double t) {
  const auto n = model.dim();
  const char* coeff = norm.tag() == NormTag::L1 ? "c_" : "d_";
  for (Eigen::Index i = 0; i < n; ++i) out << "x" << (i + 1) << ",";
  for (Eigen::Index i = 0; i < n; ++i) out << coeff << (i + 1) << ",";
  out << "mu\n";
  for (const auto& x : grid_points(region, grid)) {
    const Matrix a = scaled_matrix(norm, model.jacobian(t, x));
    for (Eigen::Index i = 0; i < n; ++i) out << format_double(x[i]) << ",";
    for (Eigen::Index i = 0; i < n; ++i)
      out << format_double(norm.tag() == NormTag::L1 ? coeff_c(a, i) : coeff_d(a, i)) << ",";
    out << format_double(matrix_measure(norm, model.jacobian(t, x))) << "\n";
  }
}

void write_certificate_csv(std::ostream& out, const GcsCertificateReport& r) {
  out << "kind,norm,tau,epsilon,verdict,rate,worst_margin,seed,pairs_checked,comparisons,t1,t2,observed,bound\n";
  out << to_string(r.kind) << "," << r.norm << "," << format_double(r.tau) << "," << format_double(r.epsilon) << ","
      << to_string(r.verdict) << "," << format_double(r.rate) << "," << format_double(r.worst_margin) << "," << r.seed
      << "," << r.pairs_checked << "," << r.comparisons << ",";
  if (r.witness) {
    out << format_double(r.witness->t1) << "," << format_double(r.witness->t2) << ","
        << format_double(r.witness->observed) << "," << format_double(r.witness->bound) << "\n";
  } else {
    out << ",,,\n";
  }
}

}  // namespace gcs
