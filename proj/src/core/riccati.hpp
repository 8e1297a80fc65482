#pragma once

#include <Eigen/Dense>

#include "chain.hpp"
#include "errors.hpp"

namespace pnfbar {

inline constexpr double kGammaUpper = 1.6180339887498949; // (1 + sqrt(5)) / 2

// ARE for the chain pair (J_n, e_n):
//   J_n^T P + P J_n - gamma * P e_n e_n^T P + Q = 0
struct AreProblem {
    ChainStructure structure;
    double gamma;
    Eigen::MatrixXd Q;

    AreProblem(ChainStructure s, double g, Eigen::MatrixXd q);
};

struct AreSolution {
    Eigen::MatrixXd P;
    double residual_norm = 0.0;
    double lambda_min_P = 0.0;
    double lambda_max_P = 0.0;

    int n() const { return static_cast<int>(P.rows()); }
};

// Frobenius norm of the ARE residual for a candidate P.
double are_residual(const AreProblem& problem, const Eigen::MatrixXd& P);

// Stabilizing solution via the Hamiltonian invariant subspace, refined by
// Newton-Kleinman iteration until the residual meets tol.
AreSolution solve_are(const AreProblem& problem, double tol = 1e-10);

// Extreme eigenvalues of a symmetric matrix. Throws NotSymmetric when the
// asymmetry exceeds sym_tol relative to the matrix norm.
std::pair<double, double> spectral_bounds(const Eigen::MatrixXd& M, double sym_tol = 1e-9);

// Admissible upper bound on the time-varying gain rate:
//   alpha < lambda_min(Q) / (2 (n-1) lambda_max(P))
// Undefined for n = 1 (the denominator vanishes).
double alpha_bound(const AreSolution& sol, const Eigen::MatrixXd& Q, int n);

// Lyapunov solve A^T X + X A + C = 0 for small dense systems (Kronecker).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);

} // namespace pnfbar
