#pragma once

#include <Eigen/Dense>
#include <optional>

#include "riccati.hpp"
#include "signal.hpp"

namespace pnfbar {

enum class Mode { Reaching, Barrier };

// Design parameters of the combined switching controller. Construction
// validates the gamma interval and the alpha admissibility bound; configs
// that intentionally exceed the bound (the reference simulation study does)
// must say so explicitly.
struct ControllerParams {
    double gamma = 1.0;
    double alpha = 0.1;
    double T = 1.0;          // predefined reaching-time upper bound
    double epsilon = 1.0;    // barrier width, in units of V
    AreSolution are;
    Eigen::MatrixXd Q;
    double gamma_tilde = 1.0;              // (1/gamma + 1) / 2
    std::optional<double> alpha_max;       // undefined for n = 1
    bool alpha_above_bound = false;
    double barrier_guard = 1.5;            // abort when V >= guard * epsilon

    static ControllerParams make(double gamma, double alpha, double T, double epsilon,
                                 AreSolution are, Eigen::MatrixXd Q,
                                 bool allow_alpha_above_bound = false);

    int n() const { return are.n(); }
    double lyapunov(const Eigen::VectorXd& x) const { return x.dot(are.P * x); }
};

struct ControllerState {
    double Gamma = 0.0;
    Mode mode = Mode::Reaching;
    std::optional<double> T1;
    double last_barrier_gain = 0.0; // held gain for discretization overrun
};

struct ControlOutput {
    double u = 0.0;
    double u0 = 0.0;
    double Lambda = 0.0;
    double kappa = 1.0;
    double V = 0.0;
    Mode mode = Mode::Reaching;
    bool switch_hint = false; // V <= epsilon/2 observed while Reaching
};

// Time-varying gain: 1/(alpha (T - t)) while reaching, 1 afterwards.
double kappa(double t, const ControllerParams& params, Mode mode);

// Applies Omega(t)^-1 = diag(1, 1/kappa, ..., kappa^{1-n}).
Eigen::VectorXd omega_inv_apply(double kappa_value, const Eigen::VectorXd& x);

// Switching manifold value gamma_tilde * e_n^T P Omega^-1 x.
double u0_value(double t, const Eigen::VectorXd& x, const ControllerParams& params, Mode mode);

// Adaptive gain rate |e_n^T P Omega^-1 x| kappa^{1-n} (reaching phase).
double gamma_dot(double t, const Eigen::VectorXd& x, const ControllerParams& params);

// Barrier gain V/(epsilon - V); throws BarrierViolated at V >= epsilon.
double barrier_gain(double V, double epsilon, double t = 0.0);

ControlOutput combined_control(double t, const Eigen::VectorXd& x, double b,
                               const ControllerParams& params, const ControllerState& state);

double nominal_control(double t, const Eigen::VectorXd& x, double b,
                       const ControllerParams& params);

double redesigned_control(double t, const Eigen::VectorXd& x, double b,
                          const ControllerParams& params, double rho);

} // namespace pnfbar
