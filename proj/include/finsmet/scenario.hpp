#pragma once

// Scenario configs (one JSON document per scenario) and the four commands
// that run them: classify, decide, verify, integrate.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "finsmet/catalog.hpp"
#include "finsmet/metrizability.hpp"
#include "finsmet/verification.hpp"

namespace finsmet {

struct InitialCondition {
  Point x;
  TangentVector v;
};

struct TrajectoryOptions {
  std::vector<InitialCondition> initial_conditions;
  std::size_t random_initial_conditions = 0;
  double step = 1e-3;
  std::size_t steps = 1000;
};

struct ScenarioConfig {
  std::string name;
  Json source;  ///< the document as given, echoed into reports

  Json metric;
  Json oneform;
  NonmetricityCoefficients coeffs;
  DomainBox box;

  std::size_t count = 200;        ///< constraint-fit samples
  std::size_t check_count = 20;   ///< fresh points for the Berwald and spray checks
  std::uint64_t seed = 1;
  AdmissibilityMargins margins;

  FitOptions fit;
  VerifyTolerances verify_tolerances;

  double kappa = 1.0;
  Theorem2Constants constants;
  std::optional<Json> F;  ///< case (i) free function
  int berwald_points = 20;
  int berwald_directions = 20;

  std::optional<Json> lagrangian;  ///< inline Lagrangian for verify / integrate

  std::size_t verify_samples = 1000;
  TrajectoryOptions verify_trajectories;
  TrajectoryOptions integrate_trajectories;

  Json overrides = Json::object();  ///< tolerance overrides applied after parsing
};

/// Parses and validates; throws ConfigError listing every problem.
ScenarioConfig parse_config(const std::string& text);

/// Tolerance keys: residual, constancy, profile, tau_formula, null, horizontal,
/// spray, deviation, conservation. Throws Config for an unknown key or a
/// non-positive value.
void set_tolerance(ScenarioConfig& config, const std::string& key, double value);
std::vector<std::string> tolerance_keys();

struct ScenarioFields {
  std::shared_ptr<const MetricField> metric;
  std::shared_ptr<const OneFormField> oneform;
  std::shared_ptr<const VectorialConnection> conn;
};

/// Options for decide(), with the case (i) function F built from the catalog.
DecideOptions decide_options(const ScenarioConfig& config);

/// Catalog fields and the connection of a parsed config.
ScenarioFields build_fields(const ScenarioConfig& config);

/// `n` points of the box inside the connection's domain. Throws
/// InsufficientData when rejection sampling cannot find them.
std::vector<Point> domain_points(const VectorialConnection& conn, const DomainBox& box, std::size_t n,
                                 Sampler& sampler);

/// `n` pairs (x, v) with x in the domain and v a unit direction admissible for L.
std::vector<std::pair<Point, TangentVector>> admissible_samples(const FinslerLagrangian& L,
                                                                const VectorialConnection& conn,
                                                                const DomainBox& box, std::size_t n,
                                                                Sampler& sampler);

struct RunOutput {
  int exit_code = 0;  ///< 0 success / metrizable / passed, 2 checked negative
  Json report;
  std::vector<std::pair<std::string, std::string>> csv;  ///< file name, contents
};

RunOutput run_classify(const ScenarioConfig& config);
RunOutput run_decide(const ScenarioConfig& config);
RunOutput run_verify(const ScenarioConfig& config);
RunOutput run_integrate(const ScenarioConfig& config);

}  // namespace finsmet
