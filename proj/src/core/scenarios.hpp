#pragma once

#include <functional>

#include "plant.hpp"

namespace pnfbar {

// Degree-5 polynomial meeting position/velocity/acceleration boundary
// conditions at both ends; clamped to the boundary values outside [t0, tf].
class QuinticTrajectory {
  public:
    QuinticTrajectory(double t0, double tf, double q0, double qf, double v0 = 0.0, double vf = 0.0,
                      double a0 = 0.0, double af = 0.0);

    struct Sample {
        double position, velocity, acceleration;
    };
    Sample eval(double t) const;

    double t0() const { return t0_; }
    double tf() const { return tf_; }

  private:
    double t0_, tf_;
    double c_[6]; // coefficients in (t - t0)
};

struct TorsionalParams {
    double k = 2.3375;       // spring constant
    double j = 0.2946;       // true inertia
    double j_m = 0.0333;     // nominal inertia
    double b_damp = 0.012195;
    Signal delta_j = Signal::sign_of_sinusoid(0.75, 1.0);
    Signal phi = Signal::sinusoid(1.0, 5.0);
};

// Tracking-error reduction of the torsional spring-damper system to an n=2
// chain: b = 1/j_m, delta_b = delta_j, f = j (theta_dd_desired + phi).
struct TorsionalReduction {
    PlantModel plant;
    QuinticTrajectory trajectory;
    // Physical input v(t) recovered from the chain input u and the error
    // state (spring cancelled against position, damper against velocity).
    std::function<double(double t, const Eigen::VectorXd& x, double u)> physical_input;
};
TorsionalReduction torsional_error_plant(const TorsionalParams& params,
                                         const QuinticTrajectory& traj, double horizon,
                                         double table_dt = 1e-3);

struct MotorParams {
    double eta_g = 0.9;
    double K_g = 70.0;
    double eta_m = 0.69;
    double k_t = 1.152e-2;
    double k_m = 1.152e-2;
    double R_m = 2.6;
};

// Placeholder rotary-pendulum parameters (externally sourced, not calibrated
// to any rig): sized so that the +/-10 V actuator comfortably covers both the
// companion-coefficient pre-feedback and the shipped torque disturbance over
// the barrier set.
struct FurutaParams {
    double m_p = 0.127;
    double L_p = 0.337;
    double L_r = 0.216;
    double J_p = 1.20e-2;
    double J_r = 9.98e-3;
    double g = 9.81;
    MotorParams motor;
    double tau_n = 0.1112;   // chain-form pre-feedback coefficient (rig value)
    double u_sat = 10.0;     // voltage saturation [V]

    double J_T() const { return J_p * m_p * L_r * L_r + J_r * J_p + 0.25 * J_r * m_p * L_p * L_p; }
};

struct LinearPlant {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
};

LinearPlant furuta_linearize(const FurutaParams& params);

// Transform to controller (Brunovsky) form via W = [B AB ... A^{n-1}B] H
// with H the Hankel matrix of characteristic-polynomial coefficients.
// Controller coordinates x satisfy z = W x; W^-1 A W = J_n + e_n c^T and
// W^-1 B = e_n, with c the (negated) characteristic coefficients.
struct ControllerFormTransform {
    Eigen::MatrixXd W;
    Eigen::MatrixXd A_transformed; // W^-1 A W
    Eigen::VectorXd B_transformed; // W^-1 B
    Eigen::VectorXd coeff_row;     // last row of A_transformed
};
ControllerFormTransform controller_form_transform(const LinearPlant& plant);

// tau = eta_g K_g eta_m k_t (V_m - K_g k_m theta_r_dot) / R_m
double torque_to_voltage(const MotorParams& m, double tau_desired, double theta_r_dot);
double voltage_to_torque(const MotorParams& m, double V_m, double theta_r_dot);

// Linearized Furuta pendulum in controller-form coordinates as an n=4 chain
// with b = 1 and the companion coefficients cancelled by pre-feedback; the
// commanded input passes through the voltage saturation of the actuator.
struct FurutaReduction {
    PlantModel plant;
    ControllerFormTransform transform;
    FurutaParams params;
    double cancel_coeff; // coefficient of x3 actually cancelled

    Eigen::VectorXd physical_state(const Eigen::VectorXd& x_chain) const {
        return transform.W * x_chain;
    }
    Eigen::VectorXd chain_state(const Eigen::VectorXd& z_physical) const;
    // Commanded motor voltage (pre-saturation) for a chain input u.
    double voltage_command(const Eigen::VectorXd& x_chain, double u) const;
};
FurutaReduction furuta_closed_loop_plant(const FurutaParams& params,
                                         Signal torque_disturbance = Signal::constant(0.0));

} // namespace pnfbar
