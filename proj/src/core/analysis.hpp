#pragma once

#include "sim.hpp"

namespace pnfbar {

// Closed-form design bounds derived from the solved ARE.
struct BoundReport {
    double mu = 0.0;                      // ultimate-bound radius parameter
    double ultimate_bound_as_written = 0.0; // sqrt(lmin/lmax) * mu
    double ultimate_bound_standard = 0.0;   // sqrt(lmax/lmin) * mu (classical form)
    double T_star_bar = 0.0;              // redesigned-control reach time
    double sigma1 = 0.0;                  // inner level set inside the barrier
    double R_eps = 0.0;                   // prescribed state-norm radius
    std::string to_text() const;
};

// mu = 2 M lmax(P) / (theta lmin(Q)) and both ultimate-bound variants. The
// as-written form and the classical form disagree unless P has equal
// extreme eigenvalues; both are reported.
struct Prop1Bounds {
    double mu, bound_as_written, bound_standard;
};
Prop1Bounds prop1_bounds(double M, double theta, const AreSolution& P, const Eigen::MatrixXd& Q);

// T* = (2 lmax(P)/lmin(Q)) ln( sqrt(lmax(P)/lmin(P)) ||x0|| / mu* )
double prop2_reach_time(double x0_norm, double mu_star, const AreSolution& P,
                        const Eigen::MatrixXd& Q);

// sigma1 = (Phi / (1 + Phi)) epsilon with Phi = M / (1 - eps_b).
double sigma1(double M, double eps_b, double epsilon);

double prescribed_radius(double epsilon, const AreSolution& P);
double epsilon_for_radius(double R_desired, const AreSolution& P);

// Reaching-phase time scaling tau(t) = -(1/alpha) ln(1 - t/T) and inverse.
double time_scaling(double t, double alpha, double T);
double inverse_time_scaling(double tau, double alpha, double T);

// Independent oracle for the reaching phase: maps trace samples into the
// scaled coordinates y = Omega^-1 x, tau = tau(t) and compares centered
// finite differences dy/dtau against the scaled vector field
//   y' = A y + e_n kappa^-n [ b (1 + delta_b) u + f ],   A = J_n + alpha D_alpha.
// Stencils straddling a sign change of the switching manifold are excluded
// (the field is discontinuous there).
struct ScaledCheckReport {
    double max_residual = 0.0;  // max componentwise |dy/dtau - field|
    double y_scale = 0.0;       // max |y| over the window
    int samples_used = 0;
    int samples_skipped = 0;
    double relative() const { return y_scale > 0.0 ? max_residual / y_scale : max_residual; }
};
ScaledCheckReport scaled_consistency_check(const Trace& trace, const PlantModel& plant,
                                           const ControllerParams& params);

Eigen::MatrixXd scaled_system_matrix(int n, double alpha);

BoundReport make_bound_report(double M, double eps_b, double theta, double epsilon,
                              double x0_norm, double mu_star, const AreSolution& P,
                              const Eigen::MatrixXd& Q);

} // namespace pnfbar
