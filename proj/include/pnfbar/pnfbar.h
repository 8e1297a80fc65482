/* C API for the pnfbar control-simulation library.
 *
 * All entry points are thread-compatible: distinct sessions may be used
 * concurrently; a single session must not be shared across threads.
 * Every function returns a pnfbar_status; on failure the session holds a
 * human-readable message.
 */
#ifndef PNFBAR_H
#define PNFBAR_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pnfbar_status {
    PNFBAR_OK = 0,
    PNFBAR_ERR_CONFIG = 1,    /* bad config file or invalid parameters */
    PNFBAR_ERR_INVARIANT = 2, /* closed-loop invariant violated during a run */
    PNFBAR_ERR_NUMERIC = 3    /* numerical failure (ARE, transforms) */
} pnfbar_status;

/* Opaque session handle; owns the last error message. */
typedef struct pnfbar_session pnfbar_session;

pnfbar_session* pnfbar_session_create(void);
void pnfbar_session_destroy(pnfbar_session* session);

/* Message describing the most recent failure on this session ("" if none).
 * The pointer stays valid until the next call on the same session. */
const char* pnfbar_last_error(const pnfbar_session* session);

/* Runs the scenario described by the JSON config file and writes the trace
 * CSV (plus .meta.json sidecar) to trace_csv_path. On an invariant abort
 * the trace prefix is still written. */
pnfbar_status pnfbar_run(pnfbar_session* session, const char* config_path,
                         const char* trace_csv_path);

/* Runs the config's sweep block; traces and a summary table are written
 * into out_dir. The summary text is copied into summary_buf (truncated to
 * buflen, always NUL-terminated) when summary_buf is non-NULL. */
pnfbar_status pnfbar_sweep(pnfbar_session* session, const char* config_path, const char* out_dir,
                           char* summary_buf, size_t buflen);

/* Formats the analytical bound report for the config into report_buf. */
pnfbar_status pnfbar_bounds(pnfbar_session* session, const char* config_path, char* report_buf,
                            size_t buflen);

/* Solves the chain ARE for order n, gain gamma and diagonal Q (q_diag may
 * be NULL for identity). P_out receives the n*n solution in row-major
 * order; residual_out (optional) the Frobenius residual. */
pnfbar_status pnfbar_are_solve(pnfbar_session* session, int n, double gamma,
                               const double* q_diag, double tol, double* P_out,
                               double* residual_out);

/* Re-validates the invariants of a stored trace (including the scaled-time
 * reaching-phase check). Returns PNFBAR_ERR_INVARIANT when a check fails;
 * the per-check report is copied into report_buf when non-NULL. */
pnfbar_status pnfbar_check_trace(pnfbar_session* session, const char* trace_csv_path,
                                 char* report_buf, size_t buflen);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PNFBAR_H */
