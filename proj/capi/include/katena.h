/* katena - declarative deployment orchestration for EVM-style applications.
 *
 * C interface over the core library: opaque project handles, status codes
 * that mirror the CLI exit codes, and JSON strings for structured results.
 * Every char** output is heap-allocated and must be released with
 * katena_string_free().
 */
#ifndef KATENA_H
#define KATENA_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum katena_status {
    KATENA_OK = 0,
    KATENA_ERR_VALIDATION = 1, /* model parse errors or constraint violations */
    KATENA_ERR_PLAN = 2,       /* planning failed (hard cycles, bad target) */
    KATENA_ERR_BACKEND = 3,    /* chain backend failure; record holds the prefix */
    KATENA_ERR_USAGE = 4       /* bad arguments, unreadable files, held locks */
} katena_status;

typedef struct katena_project katena_project;

/* Loads a model file and prepares an execution context.
 *
 * options_json is an optional JSON object; recognized keys:
 *   "inputs":      path to a YAML map resolving get_input references
 *   "secrets":     path to the secrets file (YAML map, must not be
 *                  world-accessible); env KATENA_SECRETS overrides
 *   "artifacts":   directory with <Name>.json ABI/bytecode artifacts
 *                  (default: the model file's directory)
 *   "backend":     "mock" (default) or "rpc"
 *   "rpc_url":     endpoint override for the rpc backend
 *   "record":      record file path (default: <model>.katena-state.json)
 *   "parallel":    true to run independent steps of a layer concurrently
 *   "gas_price":   legacy transaction gas price in wei (rpc)
 *   "gas_limit":   gas limit (rpc)
 *   "auth_scheme": "bearer" or "path" for provider secrets (rpc)
 */
katena_status katena_open(const char* model_path, const char* options_json,
                          katena_project** out_project);
void katena_close(katena_project* project);

/* Message for the most recent failing call on this thread. */
const char* katena_last_error(void);

/* Validation report; KATENA_ERR_VALIDATION when violations exist (the report
 * is still written to *out_report_json). */
katena_status katena_validate(katena_project* project, char** out_report_json);

/* Canonical plan documents (no execution). */
katena_status katena_plan(katena_project* project, char** out_plan_json);
katena_status katena_plan_upgrade(katena_project* project, const char* node,
                                  char** out_plan_json);
katena_status katena_plan_destroy(katena_project* project, const char* node,
                                  char** out_plan_json);

/* Execution; the record file is persisted after every step. */
katena_status katena_deploy(katena_project* project, char** out_report_json);
katena_status katena_upgrade(katena_project* project, const char* node,
                             char** out_report_json);
katena_status katena_destroy_node(katena_project* project, const char* node,
                                  char** out_report_json);

/* Current deployment record (KATENA_ERR_USAGE when none exists). */
katena_status katena_record_show(katena_project* project, char** out_record_json);

/* Number-of-Tokens metric; language is "yaml" or "js". */
katena_status katena_count_tokens(const char* text, const char* language,
                                  unsigned long long* out_tokens);
katena_status katena_count_tokens_file(const char* path, const char* language,
                                       unsigned long long* out_tokens);

void katena_string_free(char* str);

#ifdef __cplusplus
}
#endif

#endif /* KATENA_H */
