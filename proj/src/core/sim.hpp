#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "controller.hpp"
#include "plant.hpp"

namespace pnfbar {

enum class Method { Euler, RK4 };

struct SimConfig {
    double dt = 1e-3;
    double t_end = 10.0;
    Method method = Method::Euler;
    int record_stride = 1;

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        if (!(t_end > dt)) throw ConfigError("t_end must exceed dt");
        if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
    }
};

struct AugmentedState {
    Eigen::VectorXd x;
    double Gamma = 0.0;
};

struct TraceRow {
    double t;
    Eigen::VectorXd x;
    double u, V, Lambda, kappa, Gamma;
    Mode mode;
};

struct Trace {
    int n = 0;
    std::vector<TraceRow> rows;
    std::optional<double> T1;
    nlohmann::json metadata; // params/config snapshot, filled by the runner
};

// Aborted closed-loop run; carries the trace prefix up to the failure.
class SimAborted : public Error {
  public:
    SimAborted(ErrorCategory inner, const std::string& msg, double t, Trace partial)
        : Error(inner, msg), time_(t), partial_(std::move(partial)) {}
    double time() const { return time_; }
    const Trace& partial_trace() const { return partial_; }

  private:
    double time_;
    Trace partial_;
};

// One integration step of the augmented field (x, Gamma); the control is
// re-evaluated per stage under the frozen controller mode.
AugmentedState step(const PlantModel& plant, const ControllerParams& params,
                    const AugmentedState& state, const ControllerState& cstate, double t,
                    double dt, Method method);

Trace simulate(const PlantModel& plant, const ControllerParams& params, const Eigen::VectorXd& x0,
               const SimConfig& config);

// Open-loop variant driven by an arbitrary control policy; used by the
// analysis desk checks for the nominal and redesigned laws.
Trace simulate_with_policy(const PlantModel& plant, const ControllerParams& params,
                           const Eigen::VectorXd& x0, const SimConfig& config,
                           const std::function<double(double, const Eigen::VectorXd&)>& policy);

// CSV trace export: header t,x1,...,xn,u,V,Lambda,kappa,Gamma,mode plus a
// JSON sidecar <basename>.meta.json with params, config and T1.
void write_trace(const Trace& trace, const std::string& csv_path);
Trace read_trace(const std::string& csv_path);

std::string mode_name(Mode m);

} // namespace pnfbar
