#include "sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pnfbar {

std::string mode_name(Mode m) { return m == Mode::Reaching ? "reaching" : "barrier"; }

namespace {

struct Field {
    Eigen::VectorXd dx;
    double dGamma;
};

Field eval_field(const PlantModel& plant, const ControllerParams& params,
                 const ControllerState& cstate, double t, const Eigen::VectorXd& x,
                 double Gamma) {
    ControllerState s = cstate;
    s.Gamma = Gamma;
    const ControlOutput out = combined_control(t, x, plant.b.eval(t), params, s);
    Field f;
    f.dx = plant_rhs(plant, t, x, out.u);
    f.dGamma = (cstate.mode == Mode::Reaching) ? gamma_dot(t, x, params) : 0.0;
    return f;
}

std::string meta_path_for(const std::string& csv_path) {
    std::string base = csv_path;
    const auto pos = base.rfind(".csv");
    if (pos != std::string::npos && pos == base.size() - 4) base = base.substr(0, pos);
    return base + ".meta.json";
}

} // namespace

AugmentedState step(const PlantModel& plant, const ControllerParams& params,
                    const AugmentedState& state, const ControllerState& cstate, double t,
                    double dt, Method method) {
    AugmentedState next;
    if (method == Method::Euler) {
        const Field f = eval_field(plant, params, cstate, t, state.x, state.Gamma);
        next.x = state.x + dt * f.dx;
        next.Gamma = state.Gamma + dt * f.dGamma;
        return next;
    }
    const Field k1 = eval_field(plant, params, cstate, t, state.x, state.Gamma);
    const Field k2 = eval_field(plant, params, cstate, t + 0.5 * dt, state.x + 0.5 * dt * k1.dx,
                                state.Gamma + 0.5 * dt * k1.dGamma);
    const Field k3 = eval_field(plant, params, cstate, t + 0.5 * dt, state.x + 0.5 * dt * k2.dx,
                                state.Gamma + 0.5 * dt * k2.dGamma);
    const Field k4 = eval_field(plant, params, cstate, t + dt, state.x + dt * k3.dx,
                                state.Gamma + dt * k3.dGamma);
    next.x = state.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    next.Gamma = state.Gamma + dt / 6.0 * (k1.dGamma + 2.0 * k2.dGamma + 2.0 * k3.dGamma + k4.dGamma);
    return next;
}

Trace simulate(const PlantModel& plant, const ControllerParams& params, const Eigen::VectorXd& x0,
               const SimConfig& config) {
    config.validate();
    if (x0.size() != plant.structure.n)
        throw DimensionMismatch("initial state dimension does not match chain order");
    if (!x0.allFinite()) throw ConfigError("initial state must be finite");

    Trace trace;
    trace.n = plant.structure.n;
    AugmentedState aug{x0, 0.0};
    ControllerState cstate;

    const long steps = std::lround(config.t_end / config.dt);
    trace.rows.reserve(static_cast<std::size_t>(steps / config.record_stride) + 2);

    for (long k = 0; k <= steps; ++k) {
        const double t = k * config.dt;
        try {
            cstate.Gamma = aug.Gamma;
            const double V = params.lyapunov(aug.x);
            if (cstate.mode == Mode::Reaching && V <= 0.5 * params.epsilon) {
                cstate.mode = Mode::Barrier;
                cstate.T1 = t;
                trace.T1 = t;
            }
            const ControlOutput out = combined_control(t, aug.x, plant.b.eval(t), params, cstate);
            if (cstate.mode == Mode::Barrier && out.V < params.epsilon)
                cstate.last_barrier_gain = out.Lambda;
            if (k % config.record_stride == 0)
                trace.rows.push_back(
                    {t, aug.x, out.u, out.V, out.Lambda, out.kappa, aug.Gamma, cstate.mode});
            if (k < steps) aug = step(plant, params, aug, cstate, t, config.dt, config.method);
        } catch (const InvariantError& e) {
            throw SimAborted(ErrorCategory::Invariant,
                             std::string(e.what()) + " (aborted at t = " + std::to_string(t) + ")",
                             t, trace);
        }
    }
    return trace;
}

Trace simulate_with_policy(const PlantModel& plant, const ControllerParams& params,
                           const Eigen::VectorXd& x0, const SimConfig& config,
                           const std::function<double(double, const Eigen::VectorXd&)>& policy) {
    config.validate();
    Trace trace;
    trace.n = plant.structure.n;
    Eigen::VectorXd x = x0;
    const long steps = std::lround(config.t_end / config.dt);
    for (long k = 0; k <= steps; ++k) {
        const double t = k * config.dt;
        const double u = policy(t, x);
        if (k % config.record_stride == 0)
            trace.rows.push_back({t, x, u, params.lyapunov(x), 0.0, 1.0, 0.0, Mode::Barrier});
        if (k < steps) {
            if (config.method == Method::Euler) {
                x = x + config.dt * plant_rhs(plant, t, x, u);
            } else {
                const double h = config.dt;
                const Eigen::VectorXd k1 = plant_rhs(plant, t, x, u);
                const Eigen::VectorXd k2 =
                    plant_rhs(plant, t + 0.5 * h, x + 0.5 * h * k1, policy(t + 0.5 * h, x + 0.5 * h * k1));
                const Eigen::VectorXd k3 =
                    plant_rhs(plant, t + 0.5 * h, x + 0.5 * h * k2, policy(t + 0.5 * h, x + 0.5 * h * k2));
                const Eigen::VectorXd k4 =
                    plant_rhs(plant, t + h, x + h * k3, policy(t + h, x + h * k3));
                x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
    }
    return trace;
}

void write_trace(const Trace& trace, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw ConfigError("cannot open trace file for writing: " + csv_path);
    out << "t";
    for (int i = 1; i <= trace.n; ++i) out << ",x" << i;
    out << ",u,V,Lambda,kappa,Gamma,mode\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    for (const auto& row : trace.rows) {
        put(row.t);
        for (int i = 0; i < trace.n; ++i) {
            out << ',';
            put(row.x(i));
        }
        out << ',';
        put(row.u);
        out << ',';
        put(row.V);
        out << ',';
        put(row.Lambda);
        out << ',';
        put(row.kappa);
        out << ',';
        put(row.Gamma);
        out << ',' << mode_name(row.mode) << '\n';
    }

    nlohmann::json meta = trace.metadata;
    if (trace.T1)
        meta["T1"] = *trace.T1;
    else
        meta["T1"] = nullptr;
    std::ofstream mout(meta_path_for(csv_path));
    if (!mout) throw ConfigError("cannot open metadata sidecar for writing");
    mout << meta.dump(2) << '\n';
}

Trace read_trace(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw ConfigError("cannot open trace file: " + csv_path);
    std::string header;
    if (!std::getline(in, header)) throw ConfigError("empty trace file");

    int n = 0;
    {
        std::stringstream ss(header);
        std::string col;
        while (std::getline(ss, col, ','))
            if (col.size() > 1 && col[0] == 'x') ++n;
    }
    if (n == 0) throw ConfigError("trace header has no state columns");

    Trace trace;
    trace.n = n;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (static_cast<int>(cells.size()) != n + 7)
            throw ConfigError("malformed trace row: " + line);
        TraceRow row;
        row.t = std::stod(cells[0]);
        row.x.resize(n);
        for (int i = 0; i < n; ++i) row.x(i) = std::stod(cells[1 + i]);
        row.u = std::stod(cells[n + 1]);
        row.V = std::stod(cells[n + 2]);
        row.Lambda = std::stod(cells[n + 3]);
        row.kappa = std::stod(cells[n + 4]);
        row.Gamma = std::stod(cells[n + 5]);
        if (cells[n + 6] == "reaching")
            row.mode = Mode::Reaching;
        else if (cells[n + 6] == "barrier")
            row.mode = Mode::Barrier;
        else
            throw ConfigError("unknown mode in trace: " + cells[n + 6]);
        trace.rows.push_back(std::move(row));
    }

    std::ifstream min(meta_path_for(csv_path));
    if (min) {
        nlohmann::json meta = nlohmann::json::parse(min);
        if (meta.contains("T1") && !meta["T1"].is_null()) trace.T1 = meta["T1"].get<double>();
        trace.metadata = std::move(meta);
    }
    return trace;
}

} // namespace pnfbar
