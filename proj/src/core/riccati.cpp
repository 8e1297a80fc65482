#include "riccati.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <vector>

namespace pnfbar {

AreProblem::AreProblem(ChainStructure s, double g, Eigen::MatrixXd q)
    : structure(s), gamma(g), Q(std::move(q)) {
    if (!(gamma > 0.0 && gamma <= kGammaUpper + 1e-15)) {
        std::ostringstream os;
        os << "gamma = " << gamma << " outside (0, (1+sqrt(5))/2]";
        throw ConfigError(os.str());
    }
    if (Q.rows() != structure.n || Q.cols() != structure.n)
        throw DimensionMismatch("Q dimension does not match chain order");
    if ((Q - Q.transpose()).norm() > 1e-9 * (1.0 + Q.norm()))
        throw ConfigError("Q must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw ConfigError("Q must be positive definite");
}

double are_residual(const AreProblem& problem, const Eigen::MatrixXd& P) {
    const Eigen::MatrixXd J = problem.structure.jordan_block();
    const Eigen::VectorXd e = problem.structure.last_basis_vector();
    const Eigen::MatrixXd R =
        J.transpose() * P + P * J - problem.gamma * P * e * e.transpose() * P + problem.Q;
    return R.norm();
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
    const int n = static_cast<int>(A.rows());
    // vec(A^T X + X A) = (I (x) A^T + A^T (x) I) vec(X)
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
    const Eigen::MatrixXd At = A.transpose();
    for (int j = 0; j < n; ++j)
        K.block(j * n, j * n, n, n) += At;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                K(j * n + i, k * n + i) += At(j, k);
    Eigen::VectorXd c(n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) c(j * n + i) = -C(i, j);
    const Eigen::VectorXd x = K.fullPivLu().solve(c);
    Eigen::MatrixXd X(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = x(j * n + i);
    return X;
}

AreSolution solve_are(const AreProblem& problem, double tol) {
    const int n = problem.structure.n;
    const Eigen::MatrixXd J = problem.structure.jordan_block();
    const Eigen::VectorXd e = problem.structure.last_basis_vector();
    const Eigen::MatrixXd G = problem.gamma * e * e.transpose(); // B R^-1 B^T

    Eigen::MatrixXd H(2 * n, 2 * n);
    H << J, -G, -problem.Q, -J.transpose();

    Eigen::EigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success)
        throw NonConvergence("Hamiltonian eigendecomposition failed");

    const double scale = std::max(1.0, H.norm());
    std::vector<int> stable;
    for (int i = 0; i < 2 * n; ++i) {
        const double re = es.eigenvalues()(i).real();
        if (std::abs(re) < 1e-9 * scale)
            throw NoStabilizingSolution(
                "Hamiltonian matrix has an eigenvalue on the imaginary axis; "
                "no stabilizing ARE solution for this gamma");
        if (re < 0.0) stable.push_back(i);
    }
    if (static_cast<int>(stable.size()) != n)
        throw NoStabilizingSolution("stable Hamiltonian subspace has wrong dimension");

    Eigen::MatrixXcd X(n, n), Y(n, n);
    for (int k = 0; k < n; ++k) {
        X.col(k) = es.eigenvectors().col(stable[k]).head(n);
        Y.col(k) = es.eigenvectors().col(stable[k]).tail(n);
    }
    const Eigen::FullPivLU<Eigen::MatrixXcd> lu(X);
    if (!lu.isInvertible())
        throw NoStabilizingSolution("stable subspace is not a graph over the state space");
    Eigen::MatrixXd P = (Y * lu.inverse()).real();
    P = 0.5 * (P + P.transpose());

    // Newton-Kleinman refinement: each step solves a Lyapunov equation for
    // the closed-loop matrix of the current iterate.
    double res = are_residual(problem, P);
    const int max_newton = 20;
    for (int it = 0; it < max_newton && res > tol; ++it) {
        const Eigen::MatrixXd Ak = J - G * P;
        const Eigen::MatrixXd Ck = problem.Q + P * G * P;
        P = solve_lyapunov(Ak, Ck);
        P = 0.5 * (P + P.transpose());
        res = are_residual(problem, P);
    }
    if (!(res <= tol)) {
        std::ostringstream os;
        os << "ARE refinement stalled at residual " << res << " (tol " << tol << ")";
        throw NonConvergence(os.str());
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pe(P);
    const double lmin = pe.eigenvalues().minCoeff();
    const double lmax = pe.eigenvalues().maxCoeff();
    if (lmin <= 0.0)
        throw NoStabilizingSolution("computed ARE solution is not positive definite");

    AreSolution sol;
    sol.P = P;
    sol.residual_norm = res;
    sol.lambda_min_P = lmin;
    sol.lambda_max_P = lmax;
    return sol;
}

std::pair<double, double> spectral_bounds(const Eigen::MatrixXd& M, double sym_tol) {
    if (M.rows() != M.cols()) throw DimensionMismatch("spectral_bounds requires a square matrix");
    if ((M - M.transpose()).norm() > sym_tol * (1.0 + M.norm()))
        throw NotSymmetric("matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

double alpha_bound(const AreSolution& sol, const Eigen::MatrixXd& Q, int n) {
    if (n < 2)
        throw ConfigError("alpha bound is undefined for a first-order chain");
    const auto [qmin, qmax] = spectral_bounds(Q);
    (void)qmax;
    return qmin / (2.0 * (n - 1) * sol.lambda_max_P);
}

} // namespace pnfbar
