/* Copyright 2026 The htlab Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to htlab. All objects are opaque handles released with their
 * matching *_free / *_close call. Functions return an htlab_status; on
 * failure htlab_last_error() describes the most recent error on the calling
 * thread. Strings returned through out-parameters are owned by the library
 * and stay valid until their owning handle is released, unless documented
 * otherwise.
 */
#ifndef HTLAB_HTLAB_H_
#define HTLAB_HTLAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HTLAB_API __declspec(dllexport)
#else
#define HTLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum htlab_status {
  HTLAB_OK = 0,
  HTLAB_VERIFICATION_FAILED = 1,
  HTLAB_CONFIG_ERROR = 2,
  HTLAB_DEPTH_EXHAUSTED = 3,
  HTLAB_INVALID_ARGUMENT = 4,
  HTLAB_INTERNAL_ERROR = 5
} htlab_status;

typedef struct htlab_session htlab_session;
typedef struct htlab_report htlab_report;
typedef struct htlab_tree htlab_tree;

HTLAB_API const char* htlab_version(void);
HTLAB_API const char* htlab_last_error(void);
HTLAB_API const char* htlab_status_name(htlab_status status);

/* Sessions hold one parsed configuration. */
HTLAB_API htlab_status htlab_session_open(const char* config_path, htlab_session** out);
HTLAB_API htlab_status htlab_session_parse(const char* config_json, htlab_session** out);
HTLAB_API void htlab_session_close(htlab_session* session);
/* Overrides the config's seed for later runs. */
HTLAB_API htlab_status htlab_session_set_seed(htlab_session* session, uint64_t seed);
/* SHA-256 of the canonical config, lowercase hex. */
HTLAB_API const char* htlab_session_config_hash(const htlab_session* session);

/* Runs validate, universal, frequent, genericity, x or schedule. The
 * returned status is the command outcome; *out receives a report even when
 * the command fails, except for HTLAB_INVALID_ARGUMENT. */
HTLAB_API htlab_status htlab_run(htlab_session* session, const char* command, htlab_report** out);

HTLAB_API htlab_status htlab_report_status(const htlab_report* report);
HTLAB_API const char* htlab_report_summary(const htlab_report* report);
HTLAB_API size_t htlab_report_artifact_count(const htlab_report* report);
HTLAB_API const char* htlab_report_artifact_name(const htlab_report* report, size_t i);
/* Artifact bytes; *size receives the length when size is not NULL. */
HTLAB_API const char* htlab_report_artifact_data(const htlab_report* report, size_t i, size_t* size);
HTLAB_API void htlab_report_free(htlab_report* report);

/* Trees built from the session's tree section. */
HTLAB_API htlab_status htlab_tree_build(const htlab_session* session, htlab_tree** out);
HTLAB_API void htlab_tree_free(htlab_tree* tree);
HTLAB_API size_t htlab_tree_depth(const htlab_tree* tree);
HTLAB_API size_t htlab_tree_stored_depth(const htlab_tree* tree);
/* Number of vertices on a stored level; 0 for levels that are not stored. */
HTLAB_API uint64_t htlab_tree_level_size(const htlab_tree* tree, size_t level);
/* P(B_x) of vertex (level, index) as "p/q"; release with htlab_string_free. */
HTLAB_API htlab_status htlab_tree_sector_prob(const htlab_tree* tree, size_t level, uint64_t index, char** out);

/* Schedule arithmetic. */
HTLAB_API htlab_status htlab_ell(uint64_t k, uint32_t* out);
HTLAB_API htlab_status htlab_r(uint64_t k, uint64_t* out);

HTLAB_API void htlab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* HTLAB_HTLAB_H_ */
