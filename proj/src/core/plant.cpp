#include "plant.hpp"

#include <cmath>
#include <sstream>

namespace pnfbar {

void PerturbationSpec::validate(double horizon, int samples) const {
    if (eps_b < 0.0 || eps_b >= 1.0) throw ConfigError("eps_b must lie in [0, 1)");
    if (M < 0.0) throw ConfigError("M must be nonnegative");
    const double tol = 1e-9;
    for (int k = 0; k <= samples; ++k) {
        const double t = horizon * static_cast<double>(k) / samples;
        if (std::abs(f.eval(t)) > M + tol) {
            std::ostringstream os;
            os << "|f(" << t << ")| = " << std::abs(f.eval(t)) << " exceeds declared M = " << M;
            throw ConfigError(os.str());
        }
        if (std::abs(delta_b.eval(t)) > eps_b + tol) {
            std::ostringstream os;
            os << "|delta_b(" << t << ")| exceeds declared eps_b = " << eps_b;
            throw ConfigError(os.str());
        }
    }
}

void PlantModel::validate(double horizon, int samples) const {
    if (b_lower <= 0.0) throw ConfigError("b_lower must be positive");
    for (int k = 0; k <= samples; ++k) {
        const double t = horizon * static_cast<double>(k) / samples;
        if (!(b.eval(t) > b_lower)) {
            std::ostringstream os;
            os << "b(" << t << ") = " << b.eval(t) << " does not exceed b_lower = " << b_lower;
            throw ConfigError(os.str());
        }
    }
    perturbation.validate(horizon, samples);
}

Eigen::VectorXd plant_rhs(const PlantModel& model, double t, const Eigen::VectorXd& x, double u) {
    const int n = model.structure.n;
    if (x.size() != n) throw DimensionMismatch("state dimension does not match chain order");
    Eigen::VectorXd dx(n);
    for (int i = 0; i + 1 < n; ++i) dx(i) = x(i + 1);
    const double ue = model.effective_input(t, x, u);
    dx(n - 1) = model.b.eval(t) * (1.0 + model.perturbation.delta_b.eval(t)) * ue +
                model.perturbation.f.eval(t);
    return dx;
}

} // namespace pnfbar
