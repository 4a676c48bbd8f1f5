#include "finsmet/scenario.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "finsmet/report.hpp"

namespace finsmet {

namespace {

const std::vector<std::string> kTopKeys{"name",       "metric",     "oneform", "coefficients", "domain",
                                        "sampling",   "tolerances", "decide",  "lagrangian",   "verify",
                                        "integrate"};

std::size_t read_count(const Json& obj, const std::string& key, const std::string& path, Issues& issues,
                       std::size_t fallback, std::size_t minimum) {
  const double d = read_number(obj, key, path, issues, static_cast<double>(fallback));
  if (!(d >= static_cast<double>(minimum)) || d != std::round(d) || d > 1e9) {
    issues.add(path + "." + key, "must be an integer >= " + std::to_string(minimum));
    return fallback;
  }
  return static_cast<std::size_t>(d);
}

Vec4d to_vec4(const std::vector<double>& xs) {
  Vec4d out{};
  if (xs.size() == kDim) std::copy(xs.begin(), xs.end(), out.begin());
  return out;
}

TrajectoryOptions read_trajectories(const Json& obj, const std::string& path, Issues& issues) {
  TrajectoryOptions t;
  if (!obj.is_object()) {
    issues.add(path, "expected an object");
    return t;
  }
  reject_unknown_keys(obj, {"initial_conditions", "random_initial_conditions", "step", "steps"}, path, issues);
  t.step = read_number(obj, "step", path, issues, 1e-3);
  if (!(t.step > 0.0)) issues.add(path + ".step", "must be > 0");
  const double steps = read_number(obj, "steps", path, issues, 1000.0);
  if (!(steps >= 1.0) || steps != std::round(steps) || steps > 1e8)
    issues.add(path + ".steps", "must be a positive integer");
  else
    t.steps = static_cast<std::size_t>(steps);
  t.random_initial_conditions = read_count(obj, "random_initial_conditions", path, issues, 0, 0);
  if (obj.contains("initial_conditions")) {
    const Json& ics = obj.at("initial_conditions");
    if (!ics.is_array()) {
      issues.add(path + ".initial_conditions", "expected an array of {x, v} objects");
    } else {
      for (std::size_t i = 0; i < ics.size(); ++i) {
        const std::string ip = path + ".initial_conditions[" + std::to_string(i) + "]";
        reject_unknown_keys(ics[i], {"x", "v"}, ip, issues);
        InitialCondition ic;
        ic.x = Point{to_vec4(read_numbers(ics[i], "x", ip, issues, kDim))};
        ic.v = TangentVector{to_vec4(read_numbers(ics[i], "v", ip, issues, kDim))};
        t.initial_conditions.push_back(ic);
      }
    }
  }
  return t;
}

void read_lagrangian_spec(const Json& spec, const std::string& path, Issues& issues) {
  if (!spec.is_object()) {
    issues.add(path, "expected an object with a \"family\" field");
    return;
  }
  const std::string family = read_string(spec, "family", path, issues);
  if (family == "riemannian") {
    reject_unknown_keys(spec, {"family"}, path, issues);
  } else if (family == "alpha-beta") {
    reject_unknown_keys(spec, {"family", "case", "kappa", "lambda", "tau"}, path, issues);
    const std::string c = read_string(spec, "case", path, issues);
    const std::vector<std::string> cases{"power-law", "m-kropina", "riemannian", "exponential"};
    if (std::find(cases.begin(), cases.end(), c) == cases.end())
      issues.add(path + ".case", "expected one of: power-law, m-kropina, riemannian, exponential");
    read_number(spec, "kappa", path, issues, 1.0);
    if (c == "power-law") read_number(spec, "lambda", path, issues);
    if (c == "m-kropina" || c == "riemannian") read_number(spec, "tau", path, issues);
  } else if (!family.empty()) {
    issues.add(path + ".family", "unknown Lagrangian family \"" + family + "\"; available: riemannian, alpha-beta");
  }
}

/// Explicit initial conditions first, then random ones from the inner half of the box.
std::vector<std::pair<Point, TangentVector>> initial_conditions(const TrajectoryOptions& t,
                                                                const FinslerLagrangian* L,
                                                                const VectorialConnection& conn,
                                                                const DomainBox& box, Sampler& sampler) {
  std::vector<std::pair<Point, TangentVector>> out;
  for (const InitialCondition& ic : t.initial_conditions) out.emplace_back(ic.x, ic.v);
  DomainBox inner;
  for (std::size_t i = 0; i < kDim; ++i) {
    const double mid = 0.5 * (box.lo[i] + box.hi[i]);
    const double half = 0.25 * (box.hi[i] - box.lo[i]);
    inner.lo[i] = mid - half;
    inner.hi[i] = mid + half;
  }
  std::size_t found = 0;
  for (std::size_t attempt = 0; attempt < 1000 * t.random_initial_conditions && found < t.random_initial_conditions;
       ++attempt) {
    const Point x = sampler.point(inner);
    if (!conn.in_domain(x)) continue;
    const TangentVector v = sampler.direction();
    if (L && !L->admissible(x, v)) continue;
    out.emplace_back(x, v);
    ++found;
  }
  if (found < t.random_initial_conditions)
    throw Error(ErrorCode::InsufficientData, "could not draw the requested random initial conditions");
  return out;
}

std::string signature_of(const MetricField& a, const Point& x) {
  const Mat4d m = a.at(x);
  Eigen::Matrix4d e;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
  const Eigen::Vector4d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(e, Eigen::EigenvaluesOnly).eigenvalues();
  std::string sig;
  for (Eigen::Index i = 0; i < 4; ++i) sig += ev(i) > 0.0 ? '+' : '-';
  return sig;
}

Json report_head(const ScenarioConfig& config, const char* command) {
  Json j;
  j["artifact"] = Json{{"name", kArtifactName}, {"version", kArtifactVersion}};
  j["command"] = command;
  j["scenario"] = config.source;
  j["seed"] = config.seed;
  j["tolerance_overrides"] = config.overrides;
  return j;
}


std::shared_ptr<const FinslerLagrangian> inline_lagrangian(const ScenarioConfig& config, const ScenarioFields& b) {
  const Json& spec = *config.lagrangian;
  const std::string family = spec.at("family").get<std::string>();
  if (family == "riemannian") return make_riemannian(b.metric);
  AlphaBetaParams p;
  const std::string c = spec.at("case").get<std::string>();
  p.kappa = spec.value("kappa", 1.0);
  p.c1 = config.coeffs.c1;
  p.c3 = config.coeffs.c3;
  if (c == "power-law") {
    p.kind = AlphaBetaCase::PowerLaw;
    p.lambda = spec.at("lambda").get<double>();
  } else if (c == "m-kropina") {
    p.kind = AlphaBetaCase::MKropina;
    p.tau = spec.at("tau").get<double>();
  } else if (c == "riemannian") {
    p.kind = AlphaBetaCase::Riemannian;
    p.tau = spec.at("tau").get<double>();
  } else {
    p.kind = AlphaBetaCase::Exponential;
  }
  return std::make_shared<AlphaBetaMetric>(b.metric, b.oneform, p, config.margins);
}

/// The Lagrangian for verify / integrate: inline when given, else from decide.
struct LagrangianSource {
  std::shared_ptr<const FinslerLagrangian> L;
  Json origin;
};

LagrangianSource resolve_lagrangian(const ScenarioConfig& config, const ScenarioFields& b, Sampler& sampler) {
  LagrangianSource out;
  if (config.lagrangian) {
    out.L = inline_lagrangian(config, b);
    out.origin = Json{{"source", "inline"}, {"lagrangian", to_json(out.L->describe())}};
    return out;
  }
  const std::vector<Point> fit = domain_points(*b.conn, config.box, config.count, sampler);
  const std::vector<Point> check = domain_points(*b.conn, config.box, config.check_count, sampler);
  const MetrizabilityReport r = decide(*b.conn, fit, check, sampler, decide_options(config));
  out.L = r.lagrangian;
  out.origin = Json{{"source", "decide"}, {"verdict", to_string(r.verdict)},
                    {"lagrangian", r.descriptor ? to_json(*r.descriptor) : Json()}};
  return out;
}

Json state_json(const TrajectoryState& s) {
  Json x = Json::array();
  Json v = Json::array();
  for (double c : s.x.coords) x.push_back(number_json(c));
  for (double c : s.v.components) v.push_back(number_json(c));
  return Json{{"s", number_json(s.s)}, {"x", x}, {"v", v}};
}

}  // namespace

DecideOptions decide_options(const ScenarioConfig& config) {
  DecideOptions o;
  o.fit = config.fit;
  o.kappa = config.kappa;
  o.margins = config.margins;
  o.constants = config.constants;
  o.berwald_points = config.berwald_points;
  o.berwald_directions = config.berwald_directions;
  if (config.F) {
    Issues issues;
    o.F = make_catalog_function(*config.F, "decide.F", issues);
    issues.raise();
  }
  return o;
}

ScenarioFields build_fields(const ScenarioConfig& config) {
  Issues issues;
  ScenarioFields b;
  b.metric = make_catalog_metric(config.metric, "metric", issues);
  b.oneform = make_catalog_oneform(config.oneform, "oneform", issues);
  issues.raise();
  b.conn = std::make_shared<VectorialConnection>(b.metric, b.oneform, config.coeffs);
  return b;
}

std::vector<Point> domain_points(const VectorialConnection& conn, const DomainBox& box, std::size_t n,
                                 Sampler& sampler) {
  std::vector<Point> out;
  for (std::size_t attempt = 0; attempt < 100 * n + 100 && out.size() < n; ++attempt) {
    const Point x = sampler.point(box);
    if (conn.in_domain(x)) out.push_back(x);
  }
  if (out.size() < n)
    throw Error(ErrorCode::InsufficientData, "the domain box contains too few points of the fields' domain");
  return out;
}

std::vector<std::pair<Point, TangentVector>> admissible_samples(const FinslerLagrangian& L,
                                                                const VectorialConnection& conn,
                                                                const DomainBox& box, std::size_t n,
                                                                Sampler& sampler) {
  std::vector<std::pair<Point, TangentVector>> out;
  for (std::size_t attempt = 0; attempt < 100 * n + 100 && out.size() < n; ++attempt) {
    const Point x = sampler.point(box);
    if (!conn.in_domain(x)) continue;
    const TangentVector v = sampler.direction();
    if (L.admissible(x, v)) out.emplace_back(x, v);
  }
  if (out.size() < n) throw Error(ErrorCode::InsufficientData, "too few admissible (x, v) samples in the domain box");
  return out;
}

std::vector<std::string> tolerance_keys() {
  return {"residual", "constancy", "profile", "tau_formula", "null", "horizontal", "spray", "deviation",
          "conservation"};
}

void set_tolerance(ScenarioConfig& config, const std::string& key, double value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw Error(ErrorCode::Config, "tolerance " + key + " must be a positive finite number");
  double* slot = nullptr;
  if (key == "residual") slot = &config.fit.residual_tol;
  if (key == "constancy") slot = &config.fit.constancy_tol;
  if (key == "profile") slot = &config.fit.profile_tol;
  if (key == "tau_formula") slot = &config.fit.tau_formula_tol;
  if (key == "null") slot = &config.fit.null_tol;
  if (key == "horizontal") slot = &config.verify_tolerances.horizontal;
  if (key == "spray") slot = &config.verify_tolerances.spray;
  if (key == "deviation") slot = &config.verify_tolerances.deviation;
  if (key == "conservation") slot = &config.verify_tolerances.conservation;
  if (!slot) {
    std::string known;
    for (const auto& k : tolerance_keys()) known += (known.empty() ? "" : ", ") + k;
    throw Error(ErrorCode::Config, "unknown tolerance \"" + key + "\"; available: " + known);
  }
  *slot = value;
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig c;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("$: not valid JSON: ") + e.what()});
  }
  Issues issues;
  if (!doc.is_object()) {
    issues.add("$", "expected a JSON object");
    issues.raise();
  }
  c.source = doc;
  reject_unknown_keys(doc, kTopKeys, "$", issues);
  c.name = read_string(doc, "name", "$", issues, std::string("unnamed"));

  if (doc.contains("metric")) {
    c.metric = doc.at("metric");
    make_catalog_metric(c.metric, "metric", issues);
  } else {
    issues.add("metric", "missing required field");
  }
  if (doc.contains("oneform")) {
    c.oneform = doc.at("oneform");
    make_catalog_oneform(c.oneform, "oneform", issues);
  } else {
    issues.add("oneform", "missing required field");
  }

  const std::vector<double> cs = read_numbers(doc, "coefficients", "$", issues, 3);
  if (cs.size() == 3) {
    c.coeffs = {cs[0], cs[1], cs[2]};
    if (c.coeffs.all_zero())
      issues.add("$.coefficients",
                 "coefficients not all zero: vectorial nonmetricity needs (c1, c2, c3) != (0, 0, 0)");
  }

  if (doc.contains("domain")) {
    const Json& d = doc.at("domain");
    reject_unknown_keys(d, {"min", "max"}, "domain", issues);
    c.box.lo = to_vec4(read_numbers(d, "min", "domain", issues, kDim));
    c.box.hi = to_vec4(read_numbers(d, "max", "domain", issues, kDim));
    for (std::size_t i = 0; i < kDim; ++i)
      if (!(c.box.hi[i] > c.box.lo[i]))
        issues.add("domain", "max[" + std::to_string(i) + "] must exceed min[" + std::to_string(i) + "]");
  }

  const Json sampling = doc.value("sampling", Json::object());
  reject_unknown_keys(sampling, {"count", "check_count", "seed", "delta_A", "delta_B", "cone"}, "sampling", issues);
  c.count = read_count(sampling, "count", "sampling", issues, 200, 10);
  c.check_count = read_count(sampling, "check_count", "sampling", issues, 20, 1);
  const double seed = read_number(sampling, "seed", "sampling", issues, 1.0);
  if (!(seed >= 0.0) || seed != std::round(seed) || seed > 9.007199254740992e15)
    issues.add("sampling.seed", "must be a non-negative integer");
  else
    c.seed = static_cast<std::uint64_t>(seed);
  c.margins.delta_A = read_number(sampling, "delta_A", "sampling", issues, 1e-6);
  c.margins.delta_B = read_number(sampling, "delta_B", "sampling", issues, 1e-6);
  if (c.margins.delta_A < 0.0) issues.add("sampling.delta_A", "must be >= 0");
  if (c.margins.delta_B < 0.0) issues.add("sampling.delta_B", "must be >= 0");
  const std::string cone = read_string(sampling, "cone", "sampling", issues, std::string("any"));
  if (cone == "any")
    c.margins.cone = Cone::Any;
  else if (cone == "positive")
    c.margins.cone = Cone::Positive;
  else if (cone == "negative")
    c.margins.cone = Cone::Negative;
  else
    issues.add("sampling.cone", "expected \"any\", \"positive\" or \"negative\"");

  const Json tol = doc.value("tolerances", Json::object());
  reject_unknown_keys(tol, tolerance_keys(), "tolerances", issues);
  if (tol.is_object()) {
    for (const auto& [k, v] : tol.items()) {
      const auto keys = tolerance_keys();
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) continue;
      const double x = read_number(tol, k, "tolerances", issues);
      try {
        set_tolerance(c, k, x);
      } catch (const Error&) {
        issues.add("tolerances." + k, "must be a positive finite number");
      }
    }
  }

  const Json dec = doc.value("decide", Json::object());
  reject_unknown_keys(dec, {"kappa", "F", "C1", "C2", "C3", "C4", "integral_anchor", "berwald_points",
                            "berwald_directions"},
                      "decide", issues);
  c.kappa = read_number(dec, "kappa", "decide", issues, 1.0);
  if (c.kappa == 0.0) issues.add("decide.kappa", "must be nonzero");
  if (dec.contains("C1")) c.constants.C1 = read_number(dec, "C1", "decide", issues);
  c.constants.C2 = read_number(dec, "C2", "decide", issues, 0.0);
  c.constants.C3 = read_number(dec, "C3", "decide", issues, 0.0);
  c.constants.C4 = read_number(dec, "C4", "decide", issues, 0.0);
  if (dec.contains("integral_anchor"))
    c.fit.integral_anchor = read_number(dec, "integral_anchor", "decide", issues);
  if (dec.contains("F")) {
    c.F = dec.at("F");
    make_catalog_function(*c.F, "decide.F", issues);
  }
  c.berwald_points = static_cast<int>(read_count(dec, "berwald_points", "decide", issues, 20, 1));
  c.berwald_directions = static_cast<int>(read_count(dec, "berwald_directions", "decide", issues, 20, 10));

  if (doc.contains("lagrangian")) {
    c.lagrangian = doc.at("lagrangian");
    read_lagrangian_spec(*c.lagrangian, "lagrangian", issues);
  }

  const Json ver = doc.value("verify", Json::object());
  Json ver_traj = ver;
  if (ver_traj.is_object()) ver_traj.erase("samples");
  c.verify_samples = read_count(ver, "samples", "verify", issues, 1000, 1);
  c.verify_trajectories = read_trajectories(ver_traj, "verify", issues);
  c.integrate_trajectories = read_trajectories(doc.value("integrate", Json::object()), "integrate", issues);

  issues.raise();
  return c;
}

RunOutput run_classify(const ScenarioConfig& config) {
  RunOutput out;
  out.report = report_head(config, "classify");
  const auto& k = config.coeffs;
  out.report["coefficients"] = Json::array({k.c1, k.c2, k.c3});
  out.report["tags"] = to_json(classify_subfamily(k));
  out.report["exit_code"] = 0;
  return out;
}

RunOutput run_decide(const ScenarioConfig& config) {
  const ScenarioFields b = build_fields(config);
  Sampler sampler(config.seed);
  const std::vector<Point> fit = domain_points(*b.conn, config.box, config.count, sampler);
  const std::vector<Point> check = domain_points(*b.conn, config.box, config.check_count, sampler);
  const MetrizabilityReport r = decide(*b.conn, fit, check, sampler, decide_options(config));

  RunOutput out;
  out.exit_code = r.verdict == Verdict::NotMetrizableByTheseFamilies ? 2 : 0;
  out.report = report_head(config, "decide");
  out.report["metric_signature"] = signature_of(*b.metric, fit.front());
  const Json body = to_json(r);
  for (const auto& [k, v] : body.items()) out.report[k] = v;
  out.report["exit_code"] = out.exit_code;
  return out;
}

RunOutput run_verify(const ScenarioConfig& config) {
  const ScenarioFields b = build_fields(config);
  Sampler sampler(config.seed);
  const LagrangianSource src = resolve_lagrangian(config, b, sampler);

  RunOutput out;
  out.report = report_head(config, "verify");
  out.report["lagrangian"] = src.origin;
  if (!src.L) {
    out.exit_code = 2;
    out.report["result"] = Json();
    out.report["failures"] = Json::array({"no Lagrangian: the connection is not metrizable by these families"});
    out.report["exit_code"] = out.exit_code;
    return out;
  }
  VerifyConfig vc;
  vc.samples = admissible_samples(*src.L, *b.conn, config.box, config.verify_samples, sampler);
  vc.initial_conditions = initial_conditions(config.verify_trajectories, src.L.get(), *b.conn, config.box, sampler);
  vc.step = config.verify_trajectories.step;
  vc.steps = config.verify_trajectories.steps;
  vc.tolerances = config.verify_tolerances;
  const VerifyResult r = verify_bundle(*src.L, *b.conn, vc);
  out.exit_code = r.passed() ? 0 : 2;
  out.report["result"] = to_json(r);
  out.report["exit_code"] = out.exit_code;
  return out;
}

RunOutput run_integrate(const ScenarioConfig& config) {
  const ScenarioFields b = build_fields(config);
  Sampler sampler(config.seed);
  std::shared_ptr<const FinslerLagrangian> L;
  Json origin;
  if (config.lagrangian) {
    const LagrangianSource src = resolve_lagrangian(config, b, sampler);
    L = src.L;
    origin = src.origin;
  }
  const TrajectoryOptions& t = config.integrate_trajectories;
  const auto ics = initial_conditions(t, L.get(), *b.conn, config.box, sampler);
  if (ics.empty()) throw ConfigError({"integrate: no initial conditions given"});

  RunOutput out;
  out.report = report_head(config, "integrate");
  out.report["lagrangian"] = origin;
  Json trajs = Json::array();
  for (std::size_t k = 0; k < ics.size(); ++k) {
    const auto& [x0, v0] = ics[k];
    const std::string stem = "traj" + std::to_string(k);
    Json tj;
    const Trajectory ap = integrate_autoparallel(*b.conn, x0, v0, t.step, t.steps);
    out.csv.emplace_back(stem + "_autoparallel.csv", trajectory_csv(ap));
    tj["autoparallel"] = Json{{"file", stem + "_autoparallel.csv"},
                              {"states", ap.states.size()},
                              {"truncated", ap.truncated},
                              {"truncation_reason", ap.truncation_reason},
                              {"final", state_json(ap.states.back())}};
    if (L) {
      const Trajectory geo = integrate_geodesic(*L, x0, v0, t.step, t.steps);
      out.csv.emplace_back(stem + "_geodesic.csv", trajectory_csv(geo));
      tj["geodesic"] = Json{{"file", stem + "_geodesic.csv"},
                            {"states", geo.states.size()},
                            {"truncated", geo.truncated},
                            {"truncation_reason", geo.truncation_reason},
                            {"final", state_json(geo.states.back())},
                            {"lagrangian_drift", number_json(lagrangian_drift(*L, geo))}};
      tj["comparison"] = to_json(compare_trajectories(ap, geo, *L, *b.conn));
    }
    trajs.push_back(tj);
  }
  out.report["step"] = number_json(t.step);
  out.report["steps"] = t.steps;
  out.report["trajectories"] = trajs;
  out.report["exit_code"] = 0;
  return out;
}

}  // namespace finsmet
