// End-to-end acceptance checks. Each test case prints exactly one PASS/FAIL
// line so the gate can be read off the log at a glance.
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "core/analysis.hpp"
#include "core/config.hpp"
#include "core/scenarios.hpp"

using namespace pnfbar;
using nlohmann::json;

namespace {

struct Gate {
    const char* name;
    bool ok = true;
    std::string note;

    explicit Gate(const char* n) : name(n) {}
    void expect(bool cond, const char* what) {
        CHECK_MESSAGE(cond, doctest::String(what));
        if (!cond) {
            ok = false;
            append(what);
        }
    }
    void expect(bool cond, const std::string& what) { expect(cond, what.c_str()); }
    void info(const std::string& what) { append(what.c_str()); }
    void append(const char* what) {
        if (!note.empty()) note += "; ";
        note += what;
    }
    ~Gate() {
        std::printf("[%-34s] %s%s%s\n", name, ok ? "PASS" : "FAIL", note.empty() ? "" : " -- ",
                    note.c_str());
        std::fflush(stdout);
    }
};

// A closed-loop run that may have been cut short by an invariant violation;
// on abort the partial trace up to the failure is kept for inspection.
struct RunRecord {
    BuiltScenario scenario;
    Trace trace;
    bool aborted = false;
    std::string abort_msg;
};

json torsional_config(double epsilon) {
    return json{{"scenario", "torsional"},
                {"x0", {5.0, 0.0}},
                {"controller",
                 {{"gamma", 0.1},
                  {"alpha", 0.1},
                  {"T", 2.0},
                  {"epsilon", epsilon},
                  {"allow_alpha_above_bound", true}}},
                {"sim", {{"dt", 1e-3}, {"t_end", 15.0}, {"method", "euler"}}}};
}

RunRecord make_run(const json& cfg) {
    RunRecord rec;
    rec.scenario = build_scenario(cfg);
    try {
        rec.trace =
            simulate(rec.scenario.plant, rec.scenario.params, rec.scenario.x0, rec.scenario.sim);
    } catch (const SimAborted& e) {
        rec.trace = e.partial_trace();
        rec.aborted = true;
        rec.abort_msg = e.what();
    }
    return rec;
}

const RunRecord& torsional_run(double epsilon) {
    static std::map<double, RunRecord> cache;
    auto it = cache.find(epsilon);
    if (it == cache.end()) it = cache.emplace(epsilon, make_run(torsional_config(epsilon))).first;
    return it->second;
}

json chain_config(double x0_1, double M) {
    return json{{"scenario", "raw_chain"},
                {"plant",
                 {{"n", 2},
                  {"b", 1.0},
                  {"b_lower", 0.5},
                  {"f", {{"type", "sinusoid"}, {"amplitude", M}, {"omega", 5.0}}},
                  {"delta_b", {{"type", "sign_sin"}, {"amplitude", 0.5}, {"omega", 1.0}}}}},
                {"x0", {x0_1, 0.0}},
                {"controller", {{"gamma", 1.0}, {"alpha", "auto"}, {"T", 2.0}, {"epsilon", 1.0}}},
                {"sim", {{"dt", 1e-3}, {"t_end", 8.0}, {"method", "euler"}}}};
}

const RunRecord& chain_run(double x0_1, double M) {
    static std::map<std::pair<double, double>, RunRecord> cache;
    const auto key = std::make_pair(x0_1, M);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, make_run(chain_config(x0_1, M))).first;
    return it->second;
}

struct FurutaRun {
    FurutaReduction red;
    ControllerParams params;
    Trace trace;
    bool aborted = false;
    std::string abort_msg;
};

constexpr double kFurutaHorizon = 20.0;

const FurutaRun& furuta_run(double epsilon) {
    static std::map<double, FurutaRun> cache;
    auto it = cache.find(epsilon);
    if (it == cache.end()) {
        FurutaRun rec;
        const FurutaParams fp;
        rec.red = furuta_closed_loop_plant(fp, Signal::sinusoid(0.5, 2.0));
        const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(4, 4);
        const AreSolution sol = solve_are(AreProblem(ChainStructure(4), 0.45, Q));
        rec.params = ControllerParams::make(0.45, 0.002, 1.0, epsilon, sol, Q);
        Eigen::VectorXd z0(4);
        z0 << 0.0, 0.3, 0.0, 0.0;
        SimConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_end = kFurutaHorizon;
        try {
            rec.trace = simulate(rec.red.plant, rec.params, rec.red.chain_state(z0), cfg);
        } catch (const SimAborted& e) {
            rec.trace = e.partial_trace();
            rec.aborted = true;
            rec.abort_msg = e.what();
        }
        it = cache.emplace(epsilon, std::move(rec)).first;
    }
    return it->second;
}

// Barrier-gain cap 2 sigma1/(epsilon - sigma1) from the scenario's true
// perturbation levels (factor-2 discretization margin included).
double gain_cap(double M, double eps_b, double epsilon) {
    const double s1 = sigma1(M, eps_b, epsilon);
    return 2.0 * s1 / (epsilon - s1);
}

void check_gain_record(Gate& g, const RunRecord& rec, const std::string& label) {
    const auto& rows = rec.trace.rows;
    double prev_gamma = -1.0;
    bool monotone = true, finite = true;
    for (const auto& r : rows) {
        if (r.mode == Mode::Reaching) {
            if (r.Gamma < prev_gamma - 1e-12) monotone = false;
            prev_gamma = r.Gamma;
        }
        if (!std::isfinite(r.Lambda)) finite = false;
    }
    g.expect(monotone, label + ": Gamma nondecreasing while reaching");
    g.expect(finite, label + ": Lambda finite");
    if (rec.aborted) {
        // the tail bound is only defined for a run that covered its horizon;
        // the abort itself is already charged to the gate that owns the run
        g.info(label + ": tail gain bound not evaluable (run aborted)");
        return;
    }
    const double half = rec.scenario.sim.t_end / 2.0;
    const double cap = gain_cap(rec.scenario.M, rec.scenario.eps_b, rec.scenario.params.epsilon);
    double tail_sup = 0.0;
    for (const auto& r : rows)
        if (r.t >= half) tail_sup = std::max(tail_sup, r.Lambda);
    g.expect(tail_sup <= cap, label + ": tail sup Lambda within twice the invariant-gain level");
}

} // namespace

TEST_CASE("gate 01: Riccati solver correctness") {
    Gate g("01 riccati solver");
    const auto start = std::chrono::steady_clock::now();
    for (int n = 1; n <= 6; ++n) {
        for (double gamma : {0.1, 0.45, 1.0}) {
            const AreProblem prob(ChainStructure(n), gamma, Eigen::MatrixXd::Identity(n, n));
            AreSolution sol;
            try {
                sol = solve_are(prob);
            } catch (const NumericError&) {
                g.expect(false, "solver failed on an in-range (n, gamma) pair");
                continue;
            }
            g.expect(are_residual(prob, sol.P) <= 1e-9, "residual above 1e-9");
            g.expect(sol.lambda_min_P > 0.0, "P not positive definite");
        }
    }
    const AreSolution ref =
        solve_are(AreProblem(ChainStructure(2), 1.0, Eigen::MatrixXd::Identity(2, 2)));
    Eigen::MatrixXd closed(2, 2);
    const double s3 = std::sqrt(3.0);
    closed << s3, 1.0, 1.0, s3;
    g.expect((ref.P - closed).cwiseAbs().maxCoeff() <= 1e-9, "n=2 closed form mismatch");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    g.expect(secs < 1.0, "runtime exceeded 1 s");
}

TEST_CASE("gate 02: torsional tracking run") {
    Gate g("02 torsional tracking");
    const auto start = std::chrono::steady_clock::now();
    const RunRecord& rec = torsional_run(1.0);
    g.expect(!rec.aborted, "run aborted: " + rec.abort_msg);
    const auto& tr = rec.trace;
    g.expect(tr.T1.has_value() && *tr.T1 < 2.0, "barrier not reached before T = 2");
    const double R = prescribed_radius(1.0, rec.scenario.params.are);
    bool v_ok = true, x1_ok = true;
    for (const auto& r : tr.rows) {
        if (tr.T1 && r.t >= *tr.T1) {
            if (!(r.V < 1.0)) v_ok = false;
            if (!(std::abs(r.x(0)) <= R)) x1_ok = false;
        }
    }
    g.expect(v_ok, "V reached the barrier after the switch");
    g.expect(x1_ok, "|x1| left the prescribed radius after the switch");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    g.expect(secs < 5.0, "runtime exceeded 5 s");
}

TEST_CASE("gate 03: barrier-width sweep") {
    Gate g("03 barrier-width sweep");
    double prev_max_lambda = -1.0;
    bool lambda_chain_ok = true;
    for (double epsilon : {1.0, 1e-2, 1e-4}) {
        const RunRecord& rec = torsional_run(epsilon);
        if (rec.aborted) {
            g.expect(false, "epsilon = " + std::to_string(epsilon) +
                                " run aborted: " + rec.abort_msg);
            lambda_chain_ok = false;
            continue;
        }
        const auto& tr = rec.trace;
        g.expect(tr.T1.has_value(), "no switch in sweep run");
        long after = 0, inside = 0;
        double max_lambda = 0.0;
        bool guard_ok = true;
        for (const auto& r : tr.rows) {
            max_lambda = std::max(max_lambda, r.Lambda);
            if (tr.T1 && r.t >= *tr.T1) {
                ++after;
                if (r.V < epsilon) ++inside;
                if (!(r.V < 1.5 * epsilon)) guard_ok = false;
            }
        }
        if (epsilon > 1e-3) {
            g.expect(inside == after, "V reached the barrier width after the switch");
        } else {
            g.expect(after > 0 && static_cast<double>(inside) / after >= 0.99,
                     "fewer than 99% of samples inside the narrow barrier");
            g.expect(guard_ok, "V exceeded 1.5x the narrow barrier width");
        }
        if (prev_max_lambda >= 0.0 && !(max_lambda > prev_max_lambda)) lambda_chain_ok = false;
        prev_max_lambda = max_lambda;
    }
    g.expect(lambda_chain_ok, "max Lambda not strictly increasing as epsilon shrinks");
}

TEST_CASE("gate 04: predefined-time uniformity") {
    Gate g("04 predefined-time reach");
    for (double x0 : {5.0, 50.0, 500.0}) {
        for (double M : {1.0, 10.0}) {
            const RunRecord& rec = chain_run(x0, M);
            g.expect(!rec.aborted, "run aborted (gain singularity or barrier loss)");
            g.expect(rec.trace.T1.has_value() && *rec.trace.T1 < 2.0,
                     "switch later than T in a sweep run");
        }
    }
}

TEST_CASE("gate 05: adaptive-gain behavior") {
    Gate g("05 adaptive gain");
    for (double epsilon : {1.0, 1e-2, 1e-4})
        check_gain_record(g, torsional_run(epsilon), "torsional");
    for (double x0 : {5.0, 50.0, 500.0})
        for (double M : {1.0, 10.0}) check_gain_record(g, chain_run(x0, M), "chain");
}

TEST_CASE("gate 06: nominal-control ultimate bound") {
    Gate g("06 nominal ultimate bound");
    const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2);
    const AreSolution sol = solve_are(AreProblem(ChainStructure(2), 1.0, Q));
    const ControllerParams params = ControllerParams::make(1.0, 0.15, 2.0, 1.0, sol, Q);

    PlantModel plant;
    plant.structure = ChainStructure(2);
    plant.b = Signal::constant(1.0);
    plant.b_lower = 0.5;
    plant.perturbation.f = Signal::sinusoid(1.0, 5.0);
    plant.perturbation.M = 1.0;

    Eigen::VectorXd x0(2);
    x0 << 5.0, 0.0;
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 60.0;
    const Trace tr =
        simulate_with_policy(plant, params, x0, cfg, [&](double t, const Eigen::VectorXd& x) {
            return nominal_control(t, x, 1.0, params);
        });

    const Prop1Bounds b = prop1_bounds(1.0, 0.5, sol, Q);
    double entered = -1.0;
    bool stays = true, as_written_holds = true;
    for (const auto& r : tr.rows) {
        const double norm = r.x.norm();
        if (entered < 0.0 && norm <= b.bound_standard) entered = r.t;
        if (entered >= 0.0 && norm > b.bound_standard) stays = false;
        if (r.t >= cfg.t_end / 2.0 && norm > b.bound_as_written) as_written_holds = false;
    }
    g.expect(entered >= 0.0, "trajectory never entered the standard ultimate bound");
    g.expect(stays, "trajectory left the standard ultimate bound again");
    g.info(std::string("tighter published-form bound ") +
           (as_written_holds ? "also holds" : "does not hold") + " (informational)");
}

TEST_CASE("gate 07: redesigned-control reach time") {
    Gate g("07 redesigned reach time");
    const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2);
    const AreSolution sol = solve_are(AreProblem(ChainStructure(2), 1.0, Q));
    const ControllerParams params = ControllerParams::make(1.0, 0.15, 2.0, 1.0, sol, Q);

    PlantModel plant;
    plant.structure = ChainStructure(2);
    plant.b = Signal::constant(1.0);
    plant.b_lower = 0.5;
    plant.perturbation.f = Signal::sinusoid(1.0, 5.0);
    plant.perturbation.M = 1.0;

    const double rho = 1.0; // M / (1 - eps_b) with eps_b = 0
    const double mu_star = 0.5;
    const double t_star = prop2_reach_time(5.0, mu_star, sol, Q);

    Eigen::VectorXd x0(2);
    x0 << 5.0, 0.0;
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = t_star + 1.0;
    const Trace tr =
        simulate_with_policy(plant, params, x0, cfg, [&](double t, const Eigen::VectorXd& x) {
            return redesigned_control(t, x, 1.0, params, rho);
        });

    double norm_at_t_star = -1.0;
    for (const auto& r : tr.rows)
        if (r.t >= t_star) {
            norm_at_t_star = r.x.norm();
            break;
        }
    g.expect(norm_at_t_star >= 0.0, "horizon shorter than the predicted reach time");
    g.expect(norm_at_t_star <= mu_star, "||x|| above mu* at the predicted reach time");
}

TEST_CASE("gate 08: scaled-time consistency convergence") {
    Gate g("08 scaled-time oracle");
    const RunRecord& coarse = chain_run(5.0, 1.0); // dt = 1e-3
    g.expect(!coarse.aborted, "reference run aborted");
    const double r_coarse =
        scaled_consistency_check(coarse.trace, coarse.scenario.plant, coarse.scenario.params)
            .relative();
    g.expect(r_coarse <= 0.05, "residual above 0.05 at dt = 1e-3");

    json cfg = chain_config(5.0, 1.0);
    cfg["sim"]["dt"] = 5e-4;
    const BuiltScenario fine = build_scenario(cfg);
    const Trace tr = simulate(fine.plant, fine.params, fine.x0, fine.sim);
    const double r_fine = scaled_consistency_check(tr, fine.plant, fine.params).relative();
    g.expect(r_coarse / r_fine >= 1.5, "residual shrank by less than 1.5x when dt halved");
}

TEST_CASE("gate 09: rotary pendulum stabilization") {
    Gate g("09 rotary pendulum");
    {
        const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(4, 4);
        const AreSolution sol = solve_are(AreProblem(ChainStructure(4), 0.45, Q));
        g.expect(0.002 < alpha_bound(sol, Q, 4), "alpha = 0.002 violates the admissibility bound");
    }
    double prev_angle = -1.0;
    for (double epsilon : {0.5, 1.0}) {
        const FurutaRun& run = furuta_run(epsilon);
        g.expect(!run.aborted, "run aborted: " + run.abort_msg);
        if (run.aborted) continue;
        const auto& tr = run.trace;
        g.expect(tr.T1.has_value() && *tr.T1 < 1.0, "barrier not reached before T = 1");
        bool v_ok = true, sat_ok = true;
        double angle_sup = 0.0;
        const double tail = 0.75 * kFurutaHorizon;
        for (const auto& r : tr.rows) {
            if (!tr.T1 || r.t < *tr.T1) continue;
            if (!(r.V < epsilon)) v_ok = false;
            if (std::abs(run.red.voltage_command(r.x, r.u)) >= run.red.params.u_sat)
                sat_ok = false;
            if (r.t >= tail)
                angle_sup = std::max(angle_sup, std::abs(run.red.physical_state(r.x)(1)));
        }
        g.expect(v_ok, "V reached the barrier after the switch");
        g.expect(sat_ok, "voltage saturation active after the switch");
        if (prev_angle >= 0.0)
            g.expect(prev_angle < angle_sup,
                     "narrower barrier did not tighten the pendulum angle");
        prev_angle = angle_sup;
    }
}

TEST_CASE("gate 10: controller-form transform") {
    Gate g("10 controller-form transform");
    auto check_pair = [&](const LinearPlant& sys) {
        const ControllerFormTransform tf = controller_form_transform(sys);
        const int n = static_cast<int>(sys.A.rows());
        Eigen::MatrixXd companion = ChainStructure(n).jordan_block();
        companion.row(n - 1) = tf.coeff_row.transpose();
        const double tol = 1e-9 * sys.A.norm();
        g.expect((tf.A_transformed - companion).norm() <= tol, "transformed A not in chain form");
        g.expect((tf.B_transformed - ChainStructure(n).last_basis_vector()).norm() <= tol,
                 "transformed B is not the last basis vector");
    };
    check_pair(furuta_linearize(FurutaParams{}));

    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int n : {3, 4}) {
        int done = 0;
        while (done < 100) {
            LinearPlant sys;
            sys.A = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return dist(rng); });
            sys.B = Eigen::VectorXd::NullaryExpr(n, [&] { return dist(rng); });
            try {
                check_pair(sys);
            } catch (const Uncontrollable&) {
                continue;
            }
            ++done;
        }
    }
}
