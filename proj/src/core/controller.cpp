#include "controller.hpp"

#include <cmath>
#include <sstream>

namespace pnfbar {

ControllerParams ControllerParams::make(double gamma, double alpha, double T, double epsilon,
                                        AreSolution are, Eigen::MatrixXd Q,
                                        bool allow_alpha_above_bound) {
    if (!(gamma > 0.0 && gamma <= kGammaUpper + 1e-15))
        throw ConfigError("gamma outside (0, (1+sqrt(5))/2]");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(T > 0.0)) throw ConfigError("T must be positive");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");

    ControllerParams p;
    p.gamma = gamma;
    p.alpha = alpha;
    p.T = T;
    p.epsilon = epsilon;
    p.are = std::move(are);
    p.Q = std::move(Q);
    p.gamma_tilde = 0.5 * (1.0 / gamma + 1.0);
    if (p.are.n() >= 2) {
        const double bound = alpha_bound(p.are, p.Q, p.are.n());
        p.alpha_max = bound;
        if (alpha >= bound) {
            if (!allow_alpha_above_bound) {
                std::ostringstream os;
                os << "alpha = " << alpha << " is not below the admissible bound "
                   << bound << "; set allow_alpha_above_bound to override";
                throw ConfigError(os.str());
            }
            p.alpha_above_bound = true;
        }
    }
    return p;
}

double kappa(double t, const ControllerParams& params, Mode mode) {
    if (mode == Mode::Barrier) return 1.0;
    if (t >= params.T) {
        std::ostringstream os;
        os << "reaching-phase gain singular: t = " << t << " >= T = " << params.T;
        throw SingularityReached(os.str(), t);
    }
    return 1.0 / (params.alpha * (params.T - t));
}

Eigen::VectorXd omega_inv_apply(double kappa_value, const Eigen::VectorXd& x) {
    if (!(kappa_value > 0.0)) throw ConfigError("kappa must be positive");
    Eigen::VectorXd y(x.size());
    double scale = 1.0;
    for (int i = 0; i < x.size(); ++i) {
        y(i) = x(i) * scale;
        scale /= kappa_value;
    }
    return y;
}

namespace {

// Raw manifold e_n^T P Omega^-1 x (no gamma_tilde factor).
double manifold(double kappa_value, const Eigen::VectorXd& x, const ControllerParams& params) {
    const Eigen::VectorXd y = omega_inv_apply(kappa_value, x);
    return params.are.P.row(params.n() - 1).dot(y);
}

} // namespace

double u0_value(double t, const Eigen::VectorXd& x, const ControllerParams& params, Mode mode) {
    return params.gamma_tilde * manifold(kappa(t, params, mode), x, params);
}

double gamma_dot(double t, const Eigen::VectorXd& x, const ControllerParams& params) {
    const double k = kappa(t, params, Mode::Reaching);
    return std::abs(manifold(k, x, params)) * std::pow(k, 1 - params.n());
}

double barrier_gain(double V, double epsilon, double t) {
    if (V >= epsilon) {
        std::ostringstream os;
        os << "barrier invariant violated: V = " << V << " >= epsilon = " << epsilon;
        throw BarrierViolated(os.str(), t);
    }
    return V / (epsilon - V);
}

ControlOutput combined_control(double t, const Eigen::VectorXd& x, double b,
                               const ControllerParams& params, const ControllerState& state) {
    ControlOutput out;
    out.mode = state.mode;
    out.V = params.lyapunov(x);
    out.kappa = kappa(t, params, state.mode);
    out.u0 = params.gamma_tilde * manifold(out.kappa, x, params);

    if (state.mode == Mode::Reaching) {
        out.Lambda = state.Gamma;
        out.switch_hint = out.V <= 0.5 * params.epsilon;
    } else {
        if (out.V < params.epsilon) {
            out.Lambda = barrier_gain(out.V, params.epsilon, t);
        } else if (out.V < params.barrier_guard * params.epsilon) {
            // Discretization overrun: the continuous-time gain is undefined,
            // hold the last finite barrier gain for this sample.
            out.Lambda = state.last_barrier_gain;
        } else {
            std::ostringstream os;
            os << "V = " << out.V << " exceeded " << params.barrier_guard
               << " * epsilon (epsilon = " << params.epsilon << ")";
            throw BarrierViolated(os.str(), t);
        }
    }

    out.u = -(1.0 / b) *
            (std::pow(out.kappa, params.n()) * out.u0 + out.Lambda * sign_of(out.u0));
    return out;
}

double nominal_control(double t, const Eigen::VectorXd& x, double b,
                       const ControllerParams& params) {
    (void)t;
    return -params.gamma_tilde / b * params.are.P.row(params.n() - 1).dot(x);
}

double redesigned_control(double t, const Eigen::VectorXd& x, double b,
                          const ControllerParams& params, double rho) {
    if (rho < 0.0) throw ConfigError("rho must be nonnegative");
    const double m = params.gamma_tilde * params.are.P.row(params.n() - 1).dot(x);
    return nominal_control(t, x, b, params) - rho / b * sign_of(m);
}

} // namespace pnfbar
