// Command-line front end; talks to the library exclusively through the
// shared-library C API.
#include <CLI11.hpp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "pnfbar/pnfbar.h"

namespace {

struct SessionDeleter {
    void operator()(pnfbar_session* s) const { pnfbar_session_destroy(s); }
};
using Session = std::unique_ptr<pnfbar_session, SessionDeleter>;

int report(const Session& session, pnfbar_status status) {
    if (status != PNFBAR_OK)
        std::fprintf(stderr, "error: %s\n", pnfbar_last_error(session.get()));
    return static_cast<int>(status);
}

std::string default_trace_path(const std::string& config_path) {
    std::string stem = config_path;
    const auto slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    const auto dot = stem.rfind('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    return stem + "_trace.csv";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive barrier-function controller simulator for perturbed integrator chains"};
    app.require_subcommand(1);

    std::string config_path, out_path, out_dir = "sweep_out", trace_path;
    int n = 2;
    double gamma = 1.0, tol = 1e-10;
    std::vector<double> q_diag;

    auto* run = app.add_subcommand("run", "run one closed-loop simulation from a config file");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_option("-o,--out", out_path, "trace CSV output path");

    auto* sweep = app.add_subcommand("sweep", "run the config's parameter sweep");
    sweep->add_option("config", config_path, "JSON config file")->required();
    sweep->add_option("-o,--out-dir", out_dir, "directory for traces and summary");

    auto* bounds = app.add_subcommand("bounds", "print the analytical bound report");
    bounds->add_option("config", config_path, "JSON config file")->required();

    auto* are = app.add_subcommand("are", "solve the chain ARE and print P");
    are->add_option("--n", n, "chain order")->required();
    are->add_option("--gamma", gamma, "ARE gain gamma")->required();
    are->add_option("--q-diag", q_diag, "diagonal of Q (default identity)");
    are->add_option("--tol", tol, "residual tolerance");

    auto* check = app.add_subcommand("check", "re-validate invariants on a stored trace");
    check->add_option("trace", trace_path, "trace CSV file")->required();

    CLI11_PARSE(app, argc, argv);

    Session session(pnfbar_session_create());

    if (run->parsed()) {
        if (out_path.empty()) out_path = default_trace_path(config_path);
        const pnfbar_status st = pnfbar_run(session.get(), config_path.c_str(), out_path.c_str());
        if (st == PNFBAR_OK) std::printf("trace written to %s\n", out_path.c_str());
        if (st == PNFBAR_ERR_INVARIANT)
            std::fprintf(stderr, "diagnostic trace prefix written to %s\n", out_path.c_str());
        return report(session, st);
    }
    if (sweep->parsed()) {
        std::vector<char> buf(1 << 16);
        const pnfbar_status st =
            pnfbar_sweep(session.get(), config_path.c_str(), out_dir.c_str(), buf.data(), buf.size());
        if (st == PNFBAR_OK) std::printf("%s", buf.data());
        return report(session, st);
    }
    if (bounds->parsed()) {
        std::vector<char> buf(1 << 14);
        const pnfbar_status st =
            pnfbar_bounds(session.get(), config_path.c_str(), buf.data(), buf.size());
        if (st == PNFBAR_OK) std::printf("%s", buf.data());
        return report(session, st);
    }
    if (are->parsed()) {
        if (!q_diag.empty() && static_cast<int>(q_diag.size()) != n) {
            std::fprintf(stderr, "error: --q-diag needs exactly %d entries\n", n);
            return 1;
        }
        std::vector<double> P(static_cast<size_t>(n) * n);
        double residual = 0.0;
        const pnfbar_status st =
            pnfbar_are_solve(session.get(), n, gamma, q_diag.empty() ? nullptr : q_diag.data(),
                             tol, P.data(), &residual);
        if (st == PNFBAR_OK) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) std::printf("% .12g ", P[static_cast<size_t>(i) * n + j]);
                std::printf("\n");
            }
            std::printf("residual = %g\n", residual);
        }
        return report(session, st);
    }
    if (check->parsed()) {
        std::vector<char> buf(1 << 16);
        const pnfbar_status st =
            pnfbar_check_trace(session.get(), trace_path.c_str(), buf.data(), buf.size());
        std::printf("%s", buf.data());
        return report(session, st);
    }
    return 0;
}
