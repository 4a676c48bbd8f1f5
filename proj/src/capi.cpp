#include "finsmet/finsmet.h"

#include <memory>
#include <new>
#include <string>

#include "finsmet/report.hpp"
#include "finsmet/scenario.hpp"

struct fm_scenario {
  finsmet::ScenarioConfig config;
};

struct fm_report {
  finsmet::RunOutput output;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

fm_status fail(fm_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

fm_status status_of(finsmet::ErrorCode code) {
  using finsmet::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return FM_ERR_INVALID_ARGUMENT;
    case ErrorCode::Config: return FM_ERR_CONFIG;
    case ErrorCode::SingularMetric:
    case ErrorCode::Inadmissible:
    case ErrorCode::DegenerateHessian:
    case ErrorCode::NullOneForm:
    case ErrorCode::BlowUp: return FM_ERR_GEOMETRY;
    case ErrorCode::NoSubcase:
    case ErrorCode::MissingFunction:
    case ErrorCode::DegenerateResult:
    case ErrorCode::InsufficientData: return FM_ERR_RESULT;
  }
  return FM_ERR_INTERNAL;
}

/// Runs `f`, translating exceptions into a status and fm_last_error.
template <class F>
fm_status guarded(F&& f) {
  try {
    f();
    return FM_OK;
  } catch (const finsmet::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FM_ERR_INTERNAL, "unknown failure");
  }
}

template <class Run>
fm_status run(const fm_scenario* scenario, fm_report** out, Run&& r) {
  if (!scenario || !out) return fail(FM_ERR_INVALID_ARGUMENT, "null scenario or output pointer");
  *out = nullptr;
  return guarded([&] {
    auto rep = std::make_unique<fm_report>();
    rep->output = r(scenario->config);
    rep->json = finsmet::dump_report(rep->output.report);
    *out = rep.release();
  });
}

}  // namespace

extern "C" {

const char* fm_version(void) { return finsmet::kArtifactVersion; }

const char* fm_last_error(void) { return g_last_error.c_str(); }

fm_status fm_scenario_parse(const char* json_text, fm_scenario** out) {
  if (!json_text || !out) return fail(FM_ERR_INVALID_ARGUMENT, "null text or output pointer");
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<fm_scenario>();
    s->config = finsmet::parse_config(json_text);
    *out = s.release();
  });
}

void fm_scenario_free(fm_scenario* scenario) { delete scenario; }

fm_status fm_scenario_set_seed(fm_scenario* scenario, uint64_t seed) {
  if (!scenario) return fail(FM_ERR_INVALID_ARGUMENT, "null scenario");
  scenario->config.seed = seed;
  return FM_OK;
}

fm_status fm_scenario_set_tolerance(fm_scenario* scenario, const char* key, double value) {
  if (!scenario || !key) return fail(FM_ERR_INVALID_ARGUMENT, "null scenario or key");
  return guarded([&] {
    finsmet::set_tolerance(scenario->config, key, value);
    scenario->config.overrides[key] = value;
  });
}

fm_status fm_run_classify(const fm_scenario* scenario, fm_report** out) {
  return run(scenario, out, finsmet::run_classify);
}

fm_status fm_run_decide(const fm_scenario* scenario, fm_report** out) {
  return run(scenario, out, finsmet::run_decide);
}

fm_status fm_run_verify(const fm_scenario* scenario, fm_report** out) {
  return run(scenario, out, finsmet::run_verify);
}

fm_status fm_run_integrate(const fm_scenario* scenario, fm_report** out) {
  return run(scenario, out, finsmet::run_integrate);
}

int fm_report_outcome(const fm_report* report) { return report ? report->output.exit_code : 1; }

const char* fm_report_json(const fm_report* report) { return report ? report->json.c_str() : nullptr; }

size_t fm_report_csv_count(const fm_report* report) { return report ? report->output.csv.size() : 0; }

const char* fm_report_csv_name(const fm_report* report, size_t index) {
  if (!report || index >= report->output.csv.size()) return nullptr;
  return report->output.csv[index].first.c_str();
}

const char* fm_report_csv_data(const fm_report* report, size_t index) {
  if (!report || index >= report->output.csv.size()) return nullptr;
  return report->output.csv[index].second.c_str();
}

void fm_report_free(fm_report* report) { delete report; }

}  // extern "C"
