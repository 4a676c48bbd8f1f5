#include "finsmet/report.hpp"

#include <cmath>
#include <limits>

namespace finsmet {

Json number_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double json_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::InvalidArgument, "not a serialized number: " + j.dump());
}

Json to_json(const std::vector<SubfamilyTag>& tags) {
  Json out = Json::array();
  for (const SubfamilyTag& t : tags) out.push_back(Json{{"family", to_string(t.family)}, {"constraint", t.constraint}});
  return out;
}

Json to_json(const ChebyshevSeries& series) {
  Json c = Json::array();
  for (double x : series.coeffs()) c.push_back(number_json(x));
  return Json{{"basis", "chebyshev"},
              {"interval", Json::array({number_json(series.lo()), number_json(series.hi())})},
              {"coefficients", c},
              {"fit_error", number_json(series.fit_error())}};
}

Json to_json(const ConstraintFit& fit) {
  Json j;
  j["branch"] = to_string(fit.branch);
  j["verdict"] = to_string(fit.verdict);
  j["reason"] = fit.reason;
  j["samples_used"] = fit.samples_used;
  j["samples_rejected"] = fit.samples_rejected;
  j["max_residual"] = number_json(fit.max_residual);
  j["mean_residual"] = number_json(fit.mean_residual);
  j["spread"] = number_json(fit.spread);
  if (fit.branch == Branch::Generalized) {
    j["epsilon"] = number_json(fit.epsilon);
    j["C1"] = number_json(fit.C1);
    j["gradient_residual"] = number_json(fit.gradient_residual);
    j["torse_residual"] = number_json(fit.torse_residual);
    j["tau_formula_residual"] = number_json(fit.tau_formula_residual);
    j["lambda_min_abs"] = number_json(fit.lambda_min_abs);
    j["bnorm_range"] = Json::array({number_json(fit.bnorm_min), number_json(fit.bnorm_max)});
    j["integral_anchor"] = number_json(fit.integral_anchor);
    j["lambda_profile"] = fit.lambda_profile ? to_json(*fit.lambda_profile) : Json();
    j["tau_profile"] = fit.tau_profile ? to_json(*fit.tau_profile) : Json();
  } else {
    j["lambda"] = number_json(fit.lambda);
    j["tau"] = number_json(fit.tau);
    j["max_antisymmetric"] = number_json(fit.max_antisymmetric);
  }
  return j;
}

Json to_json(const LagrangianDescriptor& d) {
  Json constants;
  for (const auto& [k, v] : d.constants) constants[k] = number_json(v);
  return Json{{"family", d.family}, {"case", d.case_tag}, {"constants", constants.is_null() ? Json::object() : constants},
              {"formula", d.formula}};
}

Json to_json(const MetrizabilityReport& r) {
  Json j;
  j["tags"] = to_json(r.tags);
  Json fits = Json::array();
  for (const ConstraintFit& f : r.fits) fits.push_back(to_json(f));
  j["fits"] = fits;
  j["branch"] = r.branch ? Json(to_string(*r.branch)) : Json();
  j["lagrangian"] = r.descriptor ? to_json(*r.descriptor) : Json();
  if (r.lagrangian) {
    j["diagnostics"] = Json{{"berwald_residual", number_json(r.berwald_residual)},
                            {"gamma_mismatch", number_json(r.gamma_mismatch)},
                            {"spray_vs_connection", number_json(r.spray_vs_connection)},
                            {"euler_lagrange_residual", number_json(r.euler_lagrange_residual)},
                            {"check_samples", r.check_samples},
                            {"degenerate_samples", r.degenerate_samples}};
  }
  j["verdict"] = to_string(r.verdict);
  j["notes"] = r.notes;
  return j;
}

Json to_json(const ComparisonResult& c) {
  return Json{{"span", number_json(c.span)},
              {"max_coordinate_deviation", number_json(c.max_coordinate_deviation)},
              {"max_velocity_deviation", number_json(c.max_velocity_deviation)},
              {"geodesic_residual_on_autoparallel", number_json(c.geodesic_residual_on_autoparallel)},
              {"autoparallel_residual_on_geodesic", number_json(c.autoparallel_residual_on_geodesic)}};
}

Json to_json(const VerifyResult& r) {
  Json cmp = Json::array();
  for (const ComparisonResult& c : r.comparisons) cmp.push_back(to_json(c));
  return Json{{"horizontal_residual", number_json(r.horizontal_residual)},
              {"spray_residual", number_json(r.spray_residual)},
              {"euler_lagrange_residual", number_json(r.euler_lagrange_residual)},
              {"max_deviation", number_json(r.max_deviation)},
              {"max_velocity_deviation", number_json(r.max_velocity_deviation)},
              {"max_drift", number_json(r.max_drift)},
              {"trajectories", r.trajectories},
              {"truncated", r.truncated},
              {"comparisons", cmp},
              {"failures", r.failures},
              {"passed", r.passed()}};
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace finsmet
