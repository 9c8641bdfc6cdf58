// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "htlab/htlab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "report/commands.hpp"

struct htlab_session {
  htlab::RunConfig config;
  std::optional<std::uint64_t> seed;
  std::string hash;
};

struct htlab_report {
  htlab::CommandResult result;
};

struct htlab_tree {
  htlab::WeightedTree tree;
};

namespace {

thread_local std::string last_error;

htlab_status set_error(htlab_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

htlab_status status_for(htlab::ErrorCode code) {
  switch (htlab::outcome_for(code)) {
    case htlab::Outcome::Ok:
      return HTLAB_OK;
    case htlab::Outcome::VerificationFailed:
      return HTLAB_VERIFICATION_FAILED;
    case htlab::Outcome::ConfigError:
      return HTLAB_CONFIG_ERROR;
    case htlab::Outcome::DepthExhausted:
      return HTLAB_DEPTH_EXHAUSTED;
  }
  return HTLAB_INTERNAL_ERROR;
}

// Runs f, translating exceptions into status codes.
template <class F>
htlab_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const htlab::Error& e) {
    return set_error(status_for(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(HTLAB_DEPTH_EXHAUSTED, "out of memory");
  } catch (const std::exception& e) {
    return set_error(HTLAB_INTERNAL_ERROR, e.what());
  } catch (...) {
    return set_error(HTLAB_INTERNAL_ERROR, "unknown error");
  }
}

htlab_status open_with(htlab::RunConfig cfg, htlab_session** out) {
  auto* s = new htlab_session{std::move(cfg), std::nullopt, {}};
  s->hash = htlab::config_hash(s->config);
  *out = s;
  return HTLAB_OK;
}

}  // namespace

extern "C" {

const char* htlab_version(void) { return "0.1.0"; }

const char* htlab_last_error(void) { return last_error.c_str(); }

const char* htlab_status_name(htlab_status status) {
  switch (status) {
    case HTLAB_OK:
      return "ok";
    case HTLAB_VERIFICATION_FAILED:
      return "verification_failed";
    case HTLAB_CONFIG_ERROR:
      return "config_error";
    case HTLAB_DEPTH_EXHAUSTED:
      return "depth_exhausted";
    case HTLAB_INVALID_ARGUMENT:
      return "invalid_argument";
    case HTLAB_INTERNAL_ERROR:
      return "internal_error";
  }
  return "unknown";
}

htlab_status htlab_session_open(const char* config_path, htlab_session** out) {
  if (!config_path || !out) return set_error(HTLAB_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { return open_with(htlab::load_config(config_path), out); });
}

htlab_status htlab_session_parse(const char* config_json, htlab_session** out) {
  if (!config_json || !out) return set_error(HTLAB_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { return open_with(htlab::parse_config(config_json), out); });
}

void htlab_session_close(htlab_session* session) { delete session; }

htlab_status htlab_session_set_seed(htlab_session* session, uint64_t seed) {
  if (!session) return set_error(HTLAB_INVALID_ARGUMENT, "null session");
  session->seed = seed;
  return HTLAB_OK;
}

const char* htlab_session_config_hash(const htlab_session* session) { return session ? session->hash.c_str() : ""; }

htlab_status htlab_run(htlab_session* session, const char* command, htlab_report** out) {
  if (!session || !command || !out) return set_error(HTLAB_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto* r = new htlab_report{htlab::run_command(command, session->config, session->seed)};
    *out = r;
    htlab_status s = htlab_report_status(r);
    if (s != HTLAB_OK) last_error = r->result.summary;
    return s;
  });
}

htlab_status htlab_report_status(const htlab_report* report) {
  if (!report) return HTLAB_INVALID_ARGUMENT;
  return static_cast<htlab_status>(static_cast<int>(report->result.status));
}

const char* htlab_report_summary(const htlab_report* report) { return report ? report->result.summary.c_str() : ""; }

size_t htlab_report_artifact_count(const htlab_report* report) { return report ? report->result.artifacts.size() : 0; }

const char* htlab_report_artifact_name(const htlab_report* report, size_t i) {
  if (!report || i >= report->result.artifacts.size()) return nullptr;
  return report->result.artifacts[i].name.c_str();
}

const char* htlab_report_artifact_data(const htlab_report* report, size_t i, size_t* size) {
  if (!report || i >= report->result.artifacts.size()) {
    if (size) *size = 0;
    return nullptr;
  }
  const auto& a = report->result.artifacts[i];
  if (size) *size = a.data.size();
  return a.data.c_str();
}

void htlab_report_free(htlab_report* report) { delete report; }

htlab_status htlab_tree_build(const htlab_session* session, htlab_tree** out) {
  if (!session || !out) return set_error(HTLAB_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new htlab_tree{htlab::build_tree(session->config.tree)};
    return HTLAB_OK;
  });
}

void htlab_tree_free(htlab_tree* tree) { delete tree; }

size_t htlab_tree_depth(const htlab_tree* tree) { return tree ? tree->tree.depth() : 0; }

size_t htlab_tree_stored_depth(const htlab_tree* tree) { return tree ? tree->tree.materialized_depth() : 0; }

uint64_t htlab_tree_level_size(const htlab_tree* tree, size_t level) {
  if (!tree || level > tree->tree.materialized_depth()) return 0;
  return tree->tree.level_size(level);
}

htlab_status htlab_tree_sector_prob(const htlab_tree* tree, size_t level, uint64_t index, char** out) {
  if (!tree || !out) return set_error(HTLAB_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    htlab::VertexRef x{level, index};
    if (!tree->tree.contains(x)) return set_error(HTLAB_INVALID_ARGUMENT, "vertex " + htlab::to_string(x) + " is not stored");
    std::string s = htlab::to_string(tree->tree.sector_prob(x));
    char* buf = static_cast<char*>(std::malloc(s.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *out = buf;
    return HTLAB_OK;
  });
}

htlab_status htlab_ell(uint64_t k, uint32_t* out) {
  if (!out) return set_error(HTLAB_INVALID_ARGUMENT, "null argument");
  if (k == 0) return set_error(HTLAB_INVALID_ARGUMENT, "l(k) needs k >= 1");
  return guarded([&] {
    *out = htlab::ell(k);
    return HTLAB_OK;
  });
}

htlab_status htlab_r(uint64_t k, uint64_t* out) {
  if (!out) return set_error(HTLAB_INVALID_ARGUMENT, "null argument");
  if (k == 0) return set_error(HTLAB_INVALID_ARGUMENT, "r(k) needs k >= 1");
  return guarded([&] {
    *out = htlab::r_of(k);
    return HTLAB_OK;
  });
}

void htlab_string_free(char* s) { std::free(s); }

}  // extern "C"
