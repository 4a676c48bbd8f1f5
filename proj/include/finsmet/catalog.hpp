#pragma once

// Named metric, one-form and scalar-function families that scenario configs
// refer to. Parameters arrive as JSON objects; problems are collected with a
// path into the config instead of failing on the first one.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "finsmet/geometry.hpp"

namespace finsmet {

using Json = nlohmann::ordered_json;

/// Validation problems, each prefixed by its config path.
class Issues {
 public:
  void add(const std::string& path, const std::string& message) { list_.push_back(path + ": " + message); }
  bool empty() const { return list_.empty(); }
  const std::vector<std::string>& list() const { return list_; }
  /// Throws ConfigError carrying every recorded issue.
  void raise() const;

 private:
  std::vector<std::string> list_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Typed field readers. A missing optional field yields `fallback`; a missing
// required field (no fallback) or a wrong type records an issue.
double read_number(const Json& obj, const std::string& key, const std::string& path, Issues& issues,
                   std::optional<double> fallback = std::nullopt);
std::vector<double> read_numbers(const Json& obj, const std::string& key, const std::string& path, Issues& issues,
                                 std::size_t expected = 0);
std::string read_string(const Json& obj, const std::string& key, const std::string& path, Issues& issues,
                        std::optional<std::string> fallback = std::nullopt);
/// Records an issue for each key of `obj` not in `known`.
void reject_unknown_keys(const Json& obj, const std::vector<std::string>& known, const std::string& path,
                         Issues& issues);

const std::vector<std::string>& metric_families();
const std::vector<std::string>& oneform_families();
const std::vector<std::string>& function_families();

/// {"family": "exp", "amplitude": a, "rate": k}       a e^{k t}
/// {"family": "poly", "coefficients": [c0, c1, ...]}  sum c_i t^i
/// {"family": "power", "amplitude": a, "power": p}    a t^p (t > 0 unless p is an integer)
/// Returns nullptr after recording issues.
std::shared_ptr<const ScalarFunction> make_catalog_function(const Json& spec, const std::string& path, Issues& issues,
                                                            const std::vector<std::string>& allowed = {});

/// euclidean | minkowski | diag-power | conformal-flat
std::shared_ptr<const MetricField> make_catalog_metric(const Json& spec, const std::string& path, Issues& issues);

/// constant | exact-exponential | radial
std::shared_ptr<const OneFormField> make_catalog_oneform(const Json& spec, const std::string& path, Issues& issues);

}  // namespace finsmet
