#include "finsmet/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace finsmet {

namespace {

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

bool is_integer(double p) { return p == std::round(p); }

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

enum class FnKind { Exp, Poly, Power };

struct FunctionParams {
  FnKind kind = FnKind::Poly;
  double amplitude = 1.0;
  double rate = 1.0;
  double power = 1.0;
  std::vector<double> coefficients;

  template <class S>
  S operator()(const S& t) const {
    switch (kind) {
      case FnKind::Exp: return amplitude * exp(rate * t);
      case FnKind::Power: return amplitude * rpow(t, power);
      case FnKind::Poly: break;
    }
    // Horner.
    S r(0.0);
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) r = r * t + *it;
    return r;
  }

  bool in_domain(double t) const {
    if (kind != FnKind::Power) return true;
    if (!is_integer(power)) return t > 0.0;
    return power >= 0.0 || t != 0.0;
  }

  std::string formula(const std::string& var) const {
    switch (kind) {
      case FnKind::Exp: return num(amplitude) + " exp(" + num(rate) + " " + var + ")";
      case FnKind::Power: return num(amplitude) + " " + var + "^" + num(power);
      case FnKind::Poly: break;
    }
    std::string out;
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
      if (!out.empty()) out += " + ";
      out += num(coefficients[i]);
      if (i >= 1) out += " " + var;
      if (i >= 2) out += "^" + std::to_string(i);
    }
    return out.empty() ? "0" : out;
  }
};

std::optional<FunctionParams> read_function(const Json& spec, const std::string& path, Issues& issues,
                                            const std::vector<std::string>& allowed) {
  if (!spec.is_object()) {
    issues.add(path, "expected an object with a \"family\" field");
    return std::nullopt;
  }
  const std::string family = read_string(spec, "family", path, issues);
  const std::vector<std::string>& known = allowed.empty() ? function_families() : allowed;
  if (family.empty()) return std::nullopt;
  if (std::find(known.begin(), known.end(), family) == known.end()) {
    issues.add(path + ".family", "unknown function family \"" + family + "\"; available: " + join(known));
    return std::nullopt;
  }
  FunctionParams f;
  if (family == "exp") {
    reject_unknown_keys(spec, {"family", "amplitude", "rate"}, path, issues);
    f.kind = FnKind::Exp;
    f.amplitude = read_number(spec, "amplitude", path, issues, 1.0);
    f.rate = read_number(spec, "rate", path, issues, 1.0);
  } else if (family == "power") {
    reject_unknown_keys(spec, {"family", "amplitude", "power"}, path, issues);
    f.kind = FnKind::Power;
    f.amplitude = read_number(spec, "amplitude", path, issues, 1.0);
    f.power = read_number(spec, "power", path, issues);
  } else {
    reject_unknown_keys(spec, {"family", "coefficients"}, path, issues);
    f.kind = FnKind::Poly;
    f.coefficients = read_numbers(spec, "coefficients", path, issues);
    if (f.coefficients.empty()) issues.add(path + ".coefficients", "needs at least one coefficient");
  }
  return f;
}

Vec4d read_vec4(const Json& obj, const std::string& key, const std::string& path, Issues& issues) {
  const std::vector<double> xs = read_numbers(obj, key, path, issues, kDim);
  Vec4d out{};
  if (xs.size() == kDim) std::copy(xs.begin(), xs.end(), out.begin());
  return out;
}

struct DiagEntry {
  double coefficient = 1.0;
  std::size_t axis = 0;
  double power = 0.0;
};

}  // namespace

void Issues::raise() const {
  if (!list_.empty()) throw ConfigError(list_);
}

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error(ErrorCode::Config, [&] {
        std::string msg = "invalid configuration:";
        for (const auto& i : issues) msg += "\n  " + i;
        return msg;
      }()),
      issues_(std::move(issues)) {}

double read_number(const Json& obj, const std::string& key, const std::string& path, Issues& issues,
                   std::optional<double> fallback) {
  const std::string here = path + "." + key;
  if (!obj.is_object() || !obj.contains(key)) {
    if (fallback) return *fallback;
    issues.add(here, "missing required field");
    return 0.0;
  }
  const Json& v = obj.at(key);
  if (!v.is_number()) {
    issues.add(here, "expected a number");
    return fallback.value_or(0.0);
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) issues.add(here, "must be finite");
  return d;
}

std::vector<double> read_numbers(const Json& obj, const std::string& key, const std::string& path, Issues& issues,
                                 std::size_t expected) {
  const std::string here = path + "." + key;
  if (!obj.is_object() || !obj.contains(key)) {
    issues.add(here, "missing required field");
    return {};
  }
  const Json& v = obj.at(key);
  if (!v.is_array()) {
    issues.add(here, "expected an array of numbers");
    return {};
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      issues.add(here + "[" + std::to_string(i) + "]", "expected a number");
      return {};
    }
    out.push_back(v[i].get<double>());
  }
  if (expected != 0 && out.size() != expected) {
    issues.add(here, "expected " + std::to_string(expected) + " entries, got " + std::to_string(out.size()));
    return {};
  }
  return out;
}

std::string read_string(const Json& obj, const std::string& key, const std::string& path, Issues& issues,
                        std::optional<std::string> fallback) {
  const std::string here = path + "." + key;
  if (!obj.is_object() || !obj.contains(key)) {
    if (fallback) return *fallback;
    issues.add(here, "missing required field");
    return {};
  }
  if (!obj.at(key).is_string()) {
    issues.add(here, "expected a string");
    return fallback.value_or(std::string());
  }
  return obj.at(key).get<std::string>();
}

void reject_unknown_keys(const Json& obj, const std::vector<std::string>& known, const std::string& path,
                         Issues& issues) {
  if (!obj.is_object()) return;
  for (const auto& [k, v] : obj.items())
    if (std::find(known.begin(), known.end(), k) == known.end())
      issues.add(path + "." + k, "unknown field; expected one of: " + join(known));
}

const std::vector<std::string>& metric_families() {
  static const std::vector<std::string> f{"euclidean", "minkowski", "diag-power", "conformal-flat"};
  return f;
}

const std::vector<std::string>& oneform_families() {
  static const std::vector<std::string> f{"constant", "exact-exponential", "radial"};
  return f;
}

const std::vector<std::string>& function_families() {
  static const std::vector<std::string> f{"exp", "poly", "power"};
  return f;
}

std::shared_ptr<const ScalarFunction> make_catalog_function(const Json& spec, const std::string& path, Issues& issues,
                                                            const std::vector<std::string>& allowed) {
  const auto f = read_function(spec, path, issues, allowed);
  if (!f) return nullptr;
  const FunctionParams p = *f;
  return make_scalar_function([p](const auto& t) { return p(t); }, p.formula("z"));
}

std::shared_ptr<const MetricField> make_catalog_metric(const Json& spec, const std::string& path, Issues& issues) {
  if (!spec.is_object()) {
    issues.add(path, "expected an object with a \"family\" field");
    return nullptr;
  }
  const std::string family = read_string(spec, "family", path, issues);
  if (family.empty()) return nullptr;

  if (family == "euclidean" || family == "minkowski") {
    reject_unknown_keys(spec, {"family"}, path, issues);
    const double s0 = family == "minkowski" ? -1.0 : 1.0;
    return make_metric(
        [s0](const auto& x) {
          using S = std::decay_t<decltype(x[0])>;
          Mat4<S> m = zero_mat<S>();
          m[0][0] = S(s0);
          for (std::size_t i = 1; i < kDim; ++i) m[i][i] = S(1.0);
          return m;
        },
        family);
  }

  if (family == "diag-power") {
    reject_unknown_keys(spec, {"family", "entries"}, path, issues);
    const std::string here = path + ".entries";
    if (!spec.contains("entries") || !spec.at("entries").is_array() || spec.at("entries").size() != kDim) {
      issues.add(here, "expected an array of 4 {coefficient, axis, power} objects");
      return nullptr;
    }
    std::array<DiagEntry, kDim> entries{};
    std::string desc = "diag(";
    for (std::size_t i = 0; i < kDim; ++i) {
      const Json& e = spec.at("entries")[i];
      const std::string ep = here + "[" + std::to_string(i) + "]";
      reject_unknown_keys(e, {"coefficient", "axis", "power"}, ep, issues);
      entries[i].coefficient = read_number(e, "coefficient", ep, issues, 1.0);
      const double axis = read_number(e, "axis", ep, issues, static_cast<double>(i));
      entries[i].power = read_number(e, "power", ep, issues, 0.0);
      if (entries[i].coefficient == 0.0) issues.add(ep + ".coefficient", "must be nonzero");
      if (!(axis >= 0.0 && axis < 4.0 && is_integer(axis))) {
        issues.add(ep + ".axis", "must be 0, 1, 2 or 3");
      } else {
        entries[i].axis = static_cast<std::size_t>(axis);
      }
      desc += (i ? ", " : "") + num(entries[i].coefficient) + " (x" + std::to_string(entries[i].axis) + ")^" +
              num(entries[i].power);
    }
    desc += ")";
    auto domain = [entries](const Point& x) {
      for (const DiagEntry& e : entries) {
        const double t = x[e.axis];
        if (!is_integer(e.power) && !(t > 0.0)) return false;
        if (e.power < 0.0 && t == 0.0) return false;
        if (e.power != 0.0 && std::abs(t) < 1e-8) return false;
      }
      return true;
    };
    return make_metric(
        [entries](const auto& x) {
          using S = std::decay_t<decltype(x[0])>;
          Mat4<S> m = zero_mat<S>();
          for (std::size_t i = 0; i < kDim; ++i)
            m[i][i] = entries[i].power == 0.0 ? S(entries[i].coefficient)
                                              : entries[i].coefficient * rpow(x[entries[i].axis], entries[i].power);
          return m;
        },
        desc, domain);
  }

  if (family == "conformal-flat") {
    reject_unknown_keys(spec, {"family", "f", "signature"}, path, issues);
    const std::string sig = read_string(spec, "signature", path, issues, std::string("lorentzian"));
    if (sig != "lorentzian" && sig != "euclidean")
      issues.add(path + ".signature", "expected \"lorentzian\" or \"euclidean\"");
    if (!spec.contains("f")) {
      issues.add(path + ".f", "missing required field");
      return nullptr;
    }
    const auto f = read_function(spec.at("f"), path + ".f", issues, {});
    if (!f) return nullptr;
    const FunctionParams fp = *f;
    const double s0 = sig == "lorentzian" ? -1.0 : 1.0;
    auto domain = [fp](const Point& x) { return fp.in_domain(x[0]); };
    return make_metric(
        [fp, s0](const auto& x) {
          using S = std::decay_t<decltype(x[0])>;
          const S w = exp(2.0 * fp(x[0]));
          Mat4<S> m = zero_mat<S>();
          m[0][0] = s0 * w;
          for (std::size_t i = 1; i < kDim; ++i) m[i][i] = w;
          return m;
        },
        "exp(2 f(x0)) eta, f = " + fp.formula("x0"), domain);
  }

  issues.add(path + ".family", "unknown metric family \"" + family + "\"; available: " + join(metric_families()));
  return nullptr;
}

std::shared_ptr<const OneFormField> make_catalog_oneform(const Json& spec, const std::string& path, Issues& issues) {
  if (!spec.is_object()) {
    issues.add(path, "expected an object with a \"family\" field");
    return nullptr;
  }
  const std::string family = read_string(spec, "family", path, issues);
  if (family.empty()) return nullptr;

  if (family == "constant") {
    reject_unknown_keys(spec, {"family", "components"}, path, issues);
    const Vec4d c = read_vec4(spec, "components", path, issues);
    if (c == Vec4d{}) issues.add(path + ".components", "the one-form must not vanish");
    std::string desc = "constant (" + num(c[0]) + ", " + num(c[1]) + ", " + num(c[2]) + ", " + num(c[3]) + ")";
    return make_oneform(
        [c](const auto& x) {
          using S = std::decay_t<decltype(x[0])>;
          Vec4<S> b;
          for (std::size_t i = 0; i < kDim; ++i) b[i] = S(c[i]);
          return b;
        },
        desc);
  }

  if (family == "exact-exponential") {
    reject_unknown_keys(spec, {"family", "h"}, path, issues);
    if (!spec.contains("h")) {
      issues.add(path + ".h", "missing required field");
      return nullptr;
    }
    const auto h = read_function(spec.at("h"), path + ".h", issues, {"exp", "poly"});
    if (!h) return nullptr;
    const FunctionParams hp = *h;
    return make_oneform(
        [hp](const auto& x) {
          using S = std::decay_t<decltype(x[0])>;
          Vec4<S> b = zero_vec<S>();
          b[0] = hp(x[0]);
          return b;
        },
        "h(x0) dx0, h = " + hp.formula("x0"));
  }

  if (family == "radial") {
    reject_unknown_keys(spec, {"family", "h", "axes"}, path, issues);
    std::vector<std::size_t> axes{0, 1, 2, 3};
    if (spec.contains("axes")) {
      axes.clear();
      for (double a : read_numbers(spec, "axes", path, issues)) {
        if (!(a >= 0.0 && a < 4.0 && is_integer(a))) {
          issues.add(path + ".axes", "entries must be 0, 1, 2 or 3");
          break;
        }
        axes.push_back(static_cast<std::size_t>(a));
      }
      std::sort(axes.begin(), axes.end());
      if (axes.empty() || std::adjacent_find(axes.begin(), axes.end()) != axes.end())
        issues.add(path + ".axes", "needs distinct axes");
    }
    if (!spec.contains("h")) {
      issues.add(path + ".h", "missing required field");
      return nullptr;
    }
    const auto h = read_function(spec.at("h"), path + ".h", issues, {});
    if (!h) return nullptr;
    const FunctionParams hp = *h;
    std::array<bool, kDim> on{};
    for (std::size_t a : axes) on[a] = true;
    auto domain = [hp, on](const Point& x) {
      double r2 = 0.0;
      for (std::size_t i = 0; i < kDim; ++i)
        if (on[i]) r2 += x[i] * x[i];
      return r2 > 1e-12 && hp.in_domain(std::sqrt(r2));
    };
    return make_oneform(
        [hp, on](const auto& x) {
          using S = std::decay_t<decltype(x[0])>;
          S r2(0.0);
          for (std::size_t i = 0; i < kDim; ++i)
            if (on[i]) r2 = r2 + x[i] * x[i];
          const S r = sqrt(r2);
          const S hr = hp(r) / r;
          Vec4<S> b = zero_vec<S>();
          for (std::size_t i = 0; i < kDim; ++i)
            if (on[i]) b[i] = hr * x[i];
          return b;
        },
        "h(r) dr, h = " + hp.formula("r"), domain);
  }

  issues.add(path + ".family", "unknown one-form family \"" + family + "\"; available: " + join(oneform_families()));
  return nullptr;
}

}  // namespace finsmet
