#ifndef FINSMET_H
#define FINSMET_H

/* C interface to the finsmet library: parse a scenario, run one of the four
 * commands, read the JSON report and any CSV trajectories. Handles are opaque.
 * Every function that can fail returns an fm_status; fm_last_error() gives the
 * message of the most recent failure on the calling thread. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(FINSMET_BUILDING)
#define FM_API __attribute__((visibility("default")))
#else
#define FM_API
#endif

typedef struct fm_scenario fm_scenario;
typedef struct fm_report fm_report;

typedef enum fm_status {
  FM_OK = 0,
  FM_ERR_INVALID_ARGUMENT = 1, /* null handle or pointer, bad value */
  FM_ERR_CONFIG = 2,           /* config does not parse or validate */
  FM_ERR_GEOMETRY = 3,         /* singular metric, null one-form, inadmissible or degenerate point, blow-up */
  FM_ERR_RESULT = 4,           /* no subcase, missing function, degenerate result, too little data */
  FM_ERR_INTERNAL = 5
} fm_status;

FM_API const char* fm_version(void);
FM_API const char* fm_last_error(void);

FM_API fm_status fm_scenario_parse(const char* json_text, fm_scenario** out);
FM_API void fm_scenario_free(fm_scenario* scenario);
FM_API fm_status fm_scenario_set_seed(fm_scenario* scenario, uint64_t seed);
/* Keys: residual, constancy, profile, tau_formula, null, horizontal, spray,
 * deviation, conservation. */
FM_API fm_status fm_scenario_set_tolerance(fm_scenario* scenario, const char* key, double value);

FM_API fm_status fm_run_classify(const fm_scenario* scenario, fm_report** out);
FM_API fm_status fm_run_decide(const fm_scenario* scenario, fm_report** out);
FM_API fm_status fm_run_verify(const fm_scenario* scenario, fm_report** out);
FM_API fm_status fm_run_integrate(const fm_scenario* scenario, fm_report** out);

/* 0: success / metrizable / checks passed; 2: checked negative. */
FM_API int fm_report_outcome(const fm_report* report);
/* Owned by the report; valid until fm_report_free. */
FM_API const char* fm_report_json(const fm_report* report);
FM_API size_t fm_report_csv_count(const fm_report* report);
FM_API const char* fm_report_csv_name(const fm_report* report, size_t index);
FM_API const char* fm_report_csv_data(const fm_report* report, size_t index);
FM_API void fm_report_free(fm_report* report);

#ifdef __cplusplus
}
#endif

#endif
