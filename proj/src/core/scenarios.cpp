#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace pnfbar {

QuinticTrajectory::QuinticTrajectory(double t0, double tf, double q0, double qf, double v0,
                                     double vf, double a0, double af)
    : t0_(t0), tf_(tf) {
    if (!(tf > t0)) throw ConfigError("quintic trajectory needs tf > t0");
    const double d = tf - t0;
    c_[0] = q0;
    c_[1] = v0;
    c_[2] = 0.5 * a0;
    Eigen::Matrix3d A;
    A << d * d * d, d * d * d * d, d * d * d * d * d,
        3 * d * d, 4 * d * d * d, 5 * d * d * d * d,
        6 * d, 12 * d * d, 20 * d * d * d;
    Eigen::Vector3d rhs;
    rhs << qf - c_[0] - c_[1] * d - c_[2] * d * d, vf - c_[1] - 2 * c_[2] * d, af - 2 * c_[2];
    const Eigen::Vector3d sol = A.colPivHouseholderQr().solve(rhs);
    c_[3] = sol(0);
    c_[4] = sol(1);
    c_[5] = sol(2);
}

QuinticTrajectory::Sample QuinticTrajectory::eval(double t) const {
    const double s = std::clamp(t, t0_, tf_) - t0_;
    double p = 0.0, v = 0.0, a = 0.0;
    for (int k = 5; k >= 0; --k) p = p * s + c_[k];
    for (int k = 5; k >= 1; --k) v = v * s + k * c_[k];
    for (int k = 5; k >= 2; --k) a = a * s + k * (k - 1) * c_[k];
    return {p, v, a};
}

TorsionalReduction torsional_error_plant(const TorsionalParams& params,
                                         const QuinticTrajectory& traj, double horizon,
                                         double table_dt) {
    if (!(params.j_m > 0.0)) throw ConfigError("nominal inertia must be positive");

    // Matched perturbation f = j (theta_dd_desired + phi) per the quoted
    // error dynamics; the trajectory acceleration enters through a table.
    std::vector<double> times, accel;
    const long steps = std::lround(horizon / table_dt);
    times.reserve(steps + 1);
    accel.reserve(steps + 1);
    for (long k = 0; k <= steps; ++k) {
        const double t = k * table_dt;
        times.push_back(t);
        accel.push_back(params.j * traj.eval(t).acceleration);
    }
    const Signal f =
        Signal::sum({Signal::table(std::move(times), std::move(accel), 1),
                     scale_signal(params.phi, params.j)});

    PlantModel plant;
    plant.structure = ChainStructure(2);
    plant.b = Signal::constant(1.0 / params.j_m);
    plant.b_lower = 0.5 / params.j_m;
    plant.perturbation.delta_b = params.delta_j;
    plant.perturbation.eps_b = params.delta_j.bound();
    plant.perturbation.f = f;
    plant.perturbation.M = f.bound();

    const double k_spring = params.k;
    const double b_damp = params.b_damp;
    const QuinticTrajectory tr = traj;
    auto physical_input = [k_spring, b_damp, tr](double t, const Eigen::VectorXd& x,
                                                 double u) -> double {
        const auto d = tr.eval(t);
        const double theta = x(0) + d.position;
        const double theta_dot = x(1) + d.velocity;
        return u + k_spring * theta + b_damp * theta_dot;
    };

    return {std::move(plant), traj, physical_input};
}

LinearPlant furuta_linearize(const FurutaParams& p) {
    const double JT = p.J_T();
    if (!(JT > 0.0)) throw ConfigError("Furuta total inertia must be positive");
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
    A(0, 2) = 1.0;
    A(1, 3) = 1.0;
    A(2, 1) = 0.25 * p.m_p * p.L_p * p.L_p * p.L_r * p.g / JT;
    A(3, 1) = 0.5 * p.m_p * p.L_p * p.g * (p.J_r + p.m_p * p.L_r * p.L_r) / JT;
    Eigen::VectorXd B(4);
    B << 0.0, 0.0, (p.J_p + 0.25 * p.m_p * p.L_p * p.L_p) / JT, 0.5 * p.m_p * p.L_p * p.L_r / JT;
    return {A, B};
}

ControllerFormTransform controller_form_transform(const LinearPlant& plant) {
    const int n = static_cast<int>(plant.A.rows());
    Eigen::MatrixXd C(n, n);
    Eigen::VectorXd col = plant.B;
    for (int k = 0; k < n; ++k) {
        C.col(k) = col;
        col = plant.A * col;
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
    if (lu.rank() < n) throw Uncontrollable("pair (A, B) is not controllable");

    // Monic characteristic polynomial lambda^n + a_{n-1} lambda^{n-1} + ... + a_0.
    const Eigen::VectorXcd ev = plant.A.eigenvalues();
    std::vector<std::complex<double>> poly{1.0};
    for (int i = 0; i < n; ++i) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k] += poly[k];
            next[k + 1] -= poly[k] * ev(i);
        }
        poly = std::move(next);
    }
    std::vector<double> a(n + 1); // a[k] multiplies lambda^k
    for (int k = 0; k <= n; ++k) a[k] = poly[n - k].real();

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n - i; ++j) H(i, j) = (i + j + 1 <= n) ? a[i + j + 1] : 0.0;

    ControllerFormTransform out;
    out.W = C * H;
    const Eigen::FullPivLU<Eigen::MatrixXd> wlu(out.W);
    if (!wlu.isInvertible()) throw Uncontrollable("controller-form transform is singular");
    out.A_transformed = wlu.solve(plant.A * out.W);
    out.B_transformed = wlu.solve(plant.B);
    out.coeff_row = out.A_transformed.row(n - 1);
    return out;
}

double torque_to_voltage(const MotorParams& m, double tau_desired, double theta_r_dot) {
    const double gain = m.eta_g * m.K_g * m.eta_m * m.k_t / m.R_m;
    if (!(gain > 0.0)) throw ConfigError("motor constants must be positive");
    return tau_desired / gain + m.K_g * m.k_m * theta_r_dot;
}

double voltage_to_torque(const MotorParams& m, double V_m, double theta_r_dot) {
    return m.eta_g * m.K_g * m.eta_m * m.k_t * (V_m - m.K_g * m.k_m * theta_r_dot) / m.R_m;
}

Eigen::VectorXd FurutaReduction::chain_state(const Eigen::VectorXd& z_physical) const {
    return transform.W.fullPivLu().solve(z_physical);
}

double FurutaReduction::voltage_command(const Eigen::VectorXd& x_chain, double u) const {
    const double tau_desired = u - transform.coeff_row.dot(x_chain);
    const double theta_r_dot = (transform.W * x_chain)(2);
    return torque_to_voltage(params.motor, tau_desired, theta_r_dot);
}

FurutaReduction furuta_closed_loop_plant(const FurutaParams& params, Signal torque_disturbance) {
    const LinearPlant lin = furuta_linearize(params);
    ControllerFormTransform tf = controller_form_transform(lin);

    FurutaReduction red;
    red.transform = tf;
    red.params = params;
    red.cancel_coeff = tf.coeff_row(2);

    PlantModel plant;
    plant.structure = ChainStructure(4);
    plant.b = Signal::constant(1.0);
    plant.b_lower = 0.5;
    plant.perturbation.f = torque_disturbance;
    plant.perturbation.M = torque_disturbance.bound();

    const Eigen::VectorXd coeff = tf.coeff_row;
    const Eigen::MatrixXd W = tf.W;
    const MotorParams motor = params.motor;
    const double u_sat = params.u_sat;
    plant.input_hook = [coeff, W, motor, u_sat](double /*t*/, const Eigen::VectorXd& x,
                                                double u) -> double {
        const double tau_desired = u - coeff.dot(x);
        const double theta_r_dot = (W * x)(2);
        const double vm = torque_to_voltage(motor, tau_desired, theta_r_dot);
        const double vm_sat = std::clamp(vm, -u_sat, u_sat);
        const double tau_applied = voltage_to_torque(motor, vm_sat, theta_r_dot);
        return tau_applied + coeff.dot(x);
    };

    red.plant = std::move(plant);
    return red;
}

} // namespace pnfbar
