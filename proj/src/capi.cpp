// Copyright 2026 The bgskip Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "bgskip/app.hpp"
#include "bgskip/bgskip.h"
#include "bgskip/error.hpp"

struct bgskip_session {
  bgskip::RunConfig config;
  bgskip::ProfileRegistry registry;
  std::string last_error;
};

namespace {

using bgskip::ErrorKind;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string opt_path(const char* p) { return p ? std::string(p) : std::string(); }

bgskip_status to_status(ErrorKind k) { return static_cast<bgskip_status>(static_cast<int>(k)); }

template <typename F>
bgskip_status guarded(bgskip_session* s, F&& f) {
  if (!s) return BGSKIP_ERROR_CONFIG;
  s->last_error.clear();
  try {
    f();
    return BGSKIP_OK;
  } catch (const bgskip::Error& e) {
    s->last_error = e.what();
    return to_status(e.kind());
  } catch (const nlohmann::json::exception& e) {
    s->last_error = std::string("json: ") + e.what();
    return BGSKIP_ERROR_DATA;
  } catch (const std::exception& e) {
    s->last_error = e.what();
    return BGSKIP_ERROR_INTERNAL;
  } catch (...) {
    s->last_error = "unknown error";
    return BGSKIP_ERROR_INTERNAL;
  }
}

void set_out(char** slot, const std::string& value) {
  if (slot) *slot = dup_string(value);
}

}  // namespace

extern "C" {

const char* bgskip_version(void) { return bgskip::kToolVersion; }

bgskip_status bgskip_session_create(const char* config_json, const char* profiles_path, bgskip_session** out,
                                    char** error_out) {
  if (out) *out = nullptr;
  if (error_out) *error_out = nullptr;
  if (!out) return BGSKIP_ERROR_CONFIG;
  bgskip_session tmp;
  const bgskip_status st = guarded(&tmp, [&] {
    nlohmann::ordered_json j;
    if (config_json && *config_json) {
      try {
        j = nlohmann::ordered_json::parse(config_json);
      } catch (const nlohmann::json::exception& e) {
        bgskip::throw_config(std::string("config is not valid JSON: ") + e.what());
      }
    }
    tmp.config = bgskip::run_config_from_json(j);
    tmp.registry = profiles_path && *profiles_path ? bgskip::ProfileRegistry::load_file(profiles_path)
                                                   : bgskip::ProfileRegistry::from_environment();
    tmp.config.apply_profile_h(tmp.registry);
    *out = new bgskip_session(std::move(tmp));
  });
  if (st != BGSKIP_OK && error_out) {
    try {
      *error_out = dup_string(tmp.last_error);
    } catch (...) {
    }
  }
  return st;
}

void bgskip_session_destroy(bgskip_session* session) { delete session; }

const char* bgskip_last_error(const bgskip_session* session) {
  return session ? session->last_error.c_str() : "null session";
}

bgskip_status bgskip_session_config(bgskip_session* session, char** config_json) {
  return guarded(session, [&] { set_out(config_json, bgskip::io::dump_pretty(bgskip::to_json(session->config))); });
}

bgskip_status bgskip_list_profiles(bgskip_session* session, char** profiles_json) {
  return guarded(session, [&] {
    auto arr = bgskip::io::Json::array();
    for (const auto& p : session->registry.profiles()) arr.push_back(bgskip::io::profile_to_json(p));
    set_out(profiles_json, bgskip::io::dump_pretty(arr));
  });
}

bgskip_status bgskip_plan_record(bgskip_session* session, const char* annotation_json, char** plan_json) {
  return guarded(session, [&] {
    if (!annotation_json) bgskip::throw_config("annotation record is NULL");
    bgskip::io::AnnotationRecord rec;
    try {
      rec = bgskip::io::annotation_from_json(bgskip::io::Json::parse(annotation_json));
    } catch (const nlohmann::json::exception& e) {
      bgskip::throw_data(std::string("annotation record: ") + e.what());
    }
    const auto plan = bgskip::pcmad(rec.proposals.value_or(std::vector<bgskip::Proposal>{}), rec.image,
                                    session->config.pipeline.pcmad);
    set_out(plan_json, bgskip::io::dump_line(bgskip::io::plan_to_json(plan)));
  });
}

bgskip_status bgskip_reduction_factor(bgskip_session* session, const char* stage1, const char* stage2,
                                      double n_pixels, double m_pixels, bgskip_cost_report* out) {
  return guarded(session, [&] {
    if (!stage1 || !stage2 || !out) bgskip::throw_config("NULL argument");
    const auto rep = bgskip::reduction_factor(session->registry.find(stage1), session->registry.find(stage2),
                                              n_pixels, m_pixels);
    *out = {rep.baseline_gflops(), rep.bltnet_gflops(), rep.b_over_a, rep.m_over_n, rep.reduction_factor};
  });
}

bgskip_status bgskip_plan(bgskip_session* session, const char* annotations_path, const char* plans_out_path,
                          char** summary_json) {
  return guarded(session, [&] {
    if (!annotations_path) bgskip::throw_config("annotations path is NULL");
    const auto summary = bgskip::app::plan_command(session->config, annotations_path, opt_path(plans_out_path));
    set_out(summary_json, bgskip::io::dump_line(summary));
  });
}

bgskip_status bgskip_cost(bgskip_session* session, const char* plans_path, char** report_json, char** table) {
  return guarded(session, [&] {
    if (!plans_path) bgskip::throw_config("plans path is NULL");
    const auto res = bgskip::app::cost_command(session->config, session->registry, plans_path);
    set_out(report_json, bgskip::io::dump_pretty(res.report));
    set_out(table, res.table);
  });
}

bgskip_status bgskip_eval(bgskip_session* session, const char* detections_path, const char* annotations_path,
                          const char* plans_path, char** report_json, char** table) {
  return guarded(session, [&] {
    if (!detections_path || !annotations_path) bgskip::throw_config("detections and annotations paths are required");
    const auto res =
        bgskip::app::eval_command(session->config, detections_path, annotations_path, opt_path(plans_path));
    set_out(report_json, bgskip::io::dump_pretty(res.report));
    set_out(table, res.table);
  });
}

bgskip_status bgskip_simulate(bgskip_session* session, const char* out_dir, unsigned threads, char** report_json,
                              char** table) {
  return guarded(session, [&] {
    const auto res = bgskip::app::simulate_command(session->config, session->registry, opt_path(out_dir), threads);
    set_out(report_json, bgskip::io::dump_pretty(res.report));
    set_out(table, res.table);
  });
}

bgskip_status bgskip_sweep(bgskip_session* session, const char* annotations_path, unsigned threads,
                           char** report_json, char** table) {
  return guarded(session, [&] {
    const auto res =
        bgskip::app::sweep_command(session->config, session->registry, opt_path(annotations_path), threads);
    set_out(report_json, bgskip::io::dump_pretty(res.report));
    set_out(table, res.table);
  });
}

void bgskip_free(char* str) { std::free(str); }

}  // extern "C"
