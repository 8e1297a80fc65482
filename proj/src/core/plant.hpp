#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "chain.hpp"
#include "signal.hpp"

namespace pnfbar {

// Matched perturbation f and relative control-coefficient uncertainty
// delta_b with their declared sup bounds. The bounds exist for analysis and
// verification only; the controller never sees this struct.
struct PerturbationSpec {
    Signal f = Signal::constant(0.0);
    Signal delta_b = Signal::constant(0.0);
    double M = 0.0;
    double eps_b = 0.0;

    // Samples both signals on [0, horizon] and checks the declared bounds.
    void validate(double horizon, int samples = 100000) const;
};

// Perturbed chain of integrators:
//   x_i' = x_{i+1}           (i < n)
//   x_n' = b(t) (1 + delta_b(t)) u + f(t)
struct PlantModel {
    ChainStructure structure{1};
    Signal b = Signal::constant(1.0);
    double b_lower = 0.0;
    PerturbationSpec perturbation;
    // Optional actuator channel applied to the commanded u before it enters
    // the chain (saturation, pre-feedback). Identity when absent.
    std::function<double(double t, const Eigen::VectorXd& x, double u)> input_hook;

    double effective_input(double t, const Eigen::VectorXd& x, double u) const {
        return input_hook ? input_hook(t, x, u) : u;
    }

    void validate(double horizon, int samples = 100000) const;
};

Eigen::VectorXd plant_rhs(const PlantModel& model, double t, const Eigen::VectorXd& x, double u);

} // namespace pnfbar
