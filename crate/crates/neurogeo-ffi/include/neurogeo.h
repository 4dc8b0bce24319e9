/* C interface of the neurogeo exact neuromanifold toolkit. */

#ifndef NEUROGEO_H
#define NEUROGEO_H

/* Generated by cbindgen from neurogeo-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status of an FFI call; numeric values match the CLI exit codes.
typedef enum NgStatus {
  // The command ran and every check it performs succeeded.
  NG_OK = 0,
  // Configuration, argument, or I/O problem; no report is produced.
  NG_CONFIG_ERROR = 2,
  // A stored reference value failed to reproduce, or an internal
  // cross-check tripped. Reproduction mismatches still yield a report.
  NG_CHECK_FAILED = 3,
  // A probabilistic rank stayed inconclusive; the report is produced
  // and flags the affected quantities.
  NG_INCONCLUSIVE = 4,
} NgStatus;

// Opaque session: configuration document plus deterministic options.
typedef struct NgSession NgSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Allocates a session with default options: seed 0, library-default
// trials, no fixed prime, no degree cap, compact output, no configuration.
struct NgSession *ng_session_new(void);

// Releases a session. Passing NULL is a no-op.
void ng_session_free(struct NgSession *session);

// Stores the JSON configuration document (same schema as the CLI's
// `--config` file). NULL clears it. The text is validated when a command
// runs, not here; this only requires valid UTF-8.
enum NgStatus ng_session_set_config_json(struct NgSession *session, const char *config_json);

// Sets the seed driving every randomized step.
enum NgStatus ng_session_set_seed(struct NgSession *session, uint64_t seed);

// Sets the number of trials per probabilistic rank computation; 0 restores
// the library default.
enum NgStatus ng_session_set_trials(struct NgSession *session, size_t trials);

// Fixes the first prime of every modular rank probe; 0 restores random
// primes. A second random prime always confirms each probe.
enum NgStatus ng_session_set_prime(struct NgSession *session, uint64_t prime);

// Caps the degree searched during implicitization; 0 restores the default.
enum NgStatus ng_session_set_degree_cap(struct NgSession *session, uint32_t degree_cap);

// Chooses between indented (true) and compact (false) report JSON.
enum NgStatus ng_session_set_pretty(struct NgSession *session, bool pretty);

// Generic rank of the parametrization Jacobian versus the parameter count.
// Writes the JSON report through `out_report` on any in-band outcome.
enum NgStatus ng_run_dim(struct NgSession *session, char **out_report);

// Singularity tests for the configured subnetwork family.
enum NgStatus ng_run_singular(struct NgSession *session, char **out_report);

// Exposedness dimension count for the configured family.
enum NgStatus ng_run_exposed(struct NgSession *session, char **out_report);

// Fiber structure: scaling counts, sparse-activation decomposition, and
// scaling rigidity, as configured.
enum NgStatus ng_run_fibers(struct NgSession *session, char **out_report);

// Re-derives a stored reference data set and diffs every item. `target`
// is one of "D1", "D2", or "cubics".
enum NgStatus ng_run_reproduce(struct NgSession *session, const char *target, char **out_report);

// Message of the most recent failure on this session, or NULL when the
// last call succeeded. Borrowed; valid until the next call on the session.
const char *ng_last_error(const struct NgSession *session);

// Releases a string returned through an `out_report` parameter. Passing
// NULL is a no-op.
void ng_string_free(char *text);

// Version of the bindings as a static string; do not free.
const char *ng_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEUROGEO_H */
