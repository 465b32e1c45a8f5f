/*
 * Copyright 2026 The bgskip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the bgskip library: crop planning, FLOPs cost model and
 * evaluation for two-stage background-skipping detection.
 *
 * All functions return a bgskip_status. Strings handed out through `char**`
 * parameters are owned by the caller and released with bgskip_free(). On
 * failure bgskip_last_error() describes the most recent error of a session.
 * A session may be used by one thread at a time.
 */
#ifndef BGSKIP_BGSKIP_H_
#define BGSKIP_BGSKIP_H_

#include <stddef.h>

#if defined(_WIN32)
#define BGSKIP_API __declspec(dllexport)
#else
#define BGSKIP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bgskip_status {
  BGSKIP_OK = 0,
  BGSKIP_ERROR_CONFIG = 1,   /* bad parameters or usage */
  BGSKIP_ERROR_DATA = 2,     /* malformed or inconsistent input data */
  BGSKIP_ERROR_INTERNAL = 3  /* invariant violation */
} bgskip_status;

typedef struct bgskip_session bgskip_session;

typedef struct bgskip_cost_report {
  double baseline_gflops;
  double bltnet_gflops;
  double b_over_a;
  double m_over_n;
  double reduction_factor;
} bgskip_cost_report;

BGSKIP_API const char* bgskip_version(void);

/* Creates a session from a JSON run configuration (NULL or "" for defaults).
 * `profiles_path` selects a detector-profile file; NULL falls back to
 * $BGSKIP_PROFILES, then to the bundled profiles. On failure *out is NULL and
 * *error_out (if non-NULL) receives a message to release with bgskip_free. */
BGSKIP_API bgskip_status bgskip_session_create(const char* config_json, const char* profiles_path,
                                               bgskip_session** out, char** error_out);
BGSKIP_API void bgskip_session_destroy(bgskip_session* session);
BGSKIP_API const char* bgskip_last_error(const bgskip_session* session);

/* Effective configuration as JSON. */
BGSKIP_API bgskip_status bgskip_session_config(bgskip_session* session, char** config_json);
BGSKIP_API bgskip_status bgskip_list_profiles(bgskip_session* session, char** profiles_json);

/* Plans a single annotation record (one JSON line) and returns the plan record. */
BGSKIP_API bgskip_status bgskip_plan_record(bgskip_session* session, const char* annotation_json,
                                            char** plan_json);
BGSKIP_API bgskip_status bgskip_reduction_factor(bgskip_session* session, const char* stage1, const char* stage2,
                                                 double n_pixels, double m_pixels, bgskip_cost_report* out);

/* File-level commands. `plans_out_path`, `plans_path` and `out_dir` may be NULL. */
BGSKIP_API bgskip_status bgskip_plan(bgskip_session* session, const char* annotations_path,
                                     const char* plans_out_path, char** summary_json);
BGSKIP_API bgskip_status bgskip_cost(bgskip_session* session, const char* plans_path, char** report_json,
                                     char** table);
BGSKIP_API bgskip_status bgskip_eval(bgskip_session* session, const char* detections_path,
                                     const char* annotations_path, const char* plans_path, char** report_json,
                                     char** table);
BGSKIP_API bgskip_status bgskip_simulate(bgskip_session* session, const char* out_dir, unsigned threads,
                                         char** report_json, char** table);
BGSKIP_API bgskip_status bgskip_sweep(bgskip_session* session, const char* annotations_path, unsigned threads,
                                      char** report_json, char** table);

BGSKIP_API void bgskip_free(char* str);

#ifdef __cplusplus
}
#endif

#endif /* BGSKIP_BGSKIP_H_ */
