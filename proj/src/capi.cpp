#include "pnfbar/pnfbar.h"

#include <cstring>
#include <string>

#include "core/config.hpp"

using namespace pnfbar;

struct pnfbar_session {
    std::string last_error;
};

namespace {

void copy_out(char* buf, size_t buflen, const std::string& text) {
    if (!buf || buflen == 0) return;
    const size_t n = std::min(buflen - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
}

template <typename Fn>
pnfbar_status guarded(pnfbar_session* session, Fn&& fn) {
    if (!session) return PNFBAR_ERR_CONFIG;
    session->last_error.clear();
    try {
        return fn();
    } catch (const Error& e) {
        session->last_error = e.what();
        return static_cast<pnfbar_status>(static_cast<int>(e.category()));
    } catch (const std::exception& e) {
        session->last_error = e.what();
        return PNFBAR_ERR_NUMERIC;
    }
}

} // namespace

extern "C" {

pnfbar_session* pnfbar_session_create(void) { return new pnfbar_session; }

void pnfbar_session_destroy(pnfbar_session* session) { delete session; }

const char* pnfbar_last_error(const pnfbar_session* session) {
    return session ? session->last_error.c_str() : "";
}

pnfbar_status pnfbar_run(pnfbar_session* session, const char* config_path,
                         const char* trace_csv_path) {
    return guarded(session, [&]() -> pnfbar_status {
        if (!config_path || !trace_csv_path) throw ConfigError("null path argument");
        run_config(load_config(config_path), trace_csv_path);
        return PNFBAR_OK;
    });
}

pnfbar_status pnfbar_sweep(pnfbar_session* session, const char* config_path, const char* out_dir,
                           char* summary_buf, size_t buflen) {
    return guarded(session, [&]() -> pnfbar_status {
        if (!config_path || !out_dir) throw ConfigError("null path argument");
        const auto rows = sweep_config(load_config(config_path), out_dir);
        copy_out(summary_buf, buflen, sweep_table_text(rows));
        return PNFBAR_OK;
    });
}

pnfbar_status pnfbar_bounds(pnfbar_session* session, const char* config_path, char* report_buf,
                            size_t buflen) {
    return guarded(session, [&]() -> pnfbar_status {
        if (!config_path) throw ConfigError("null path argument");
        copy_out(report_buf, buflen, bounds_text(load_config(config_path)));
        return PNFBAR_OK;
    });
}

pnfbar_status pnfbar_are_solve(pnfbar_session* session, int n, double gamma,
                               const double* q_diag, double tol, double* P_out,
                               double* residual_out) {
    return guarded(session, [&]() -> pnfbar_status {
        if (!P_out) throw ConfigError("null output buffer");
        Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
        if (q_diag)
            for (int i = 0; i < n; ++i) Q(i, i) = q_diag[i];
        const AreSolution sol =
            solve_are(AreProblem(ChainStructure(n), gamma, Q), tol > 0.0 ? tol : 1e-10);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) P_out[i * n + j] = sol.P(i, j);
        if (residual_out) *residual_out = sol.residual_norm;
        return PNFBAR_OK;
    });
}

pnfbar_status pnfbar_check_trace(pnfbar_session* session, const char* trace_csv_path,
                                 char* report_buf, size_t buflen) {
    return guarded(session, [&]() -> pnfbar_status {
        if (!trace_csv_path) throw ConfigError("null path argument");
        const TraceCheckResult res = check_trace_file(trace_csv_path);
        copy_out(report_buf, buflen, res.report);
        if (!res.ok) {
            session->last_error = "trace invariant checks failed";
            return PNFBAR_ERR_INVARIANT;
        }
        return PNFBAR_OK;
    });
}

} // extern "C"
