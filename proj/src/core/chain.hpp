#pragma once

#include <Eigen/Dense>

#include "errors.hpp"

namespace pnfbar {

// Chain of integrators of order n. The drift matrix is the n-th Jordan
// block (ones on the superdiagonal) and the input enters through the last
// canonical basis vector.
struct ChainStructure {
    int n = 1;

    explicit ChainStructure(int order) : n(order) {
        if (n < 1) throw ConfigError("chain order must be >= 1");
    }

    Eigen::MatrixXd jordan_block() const {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = 1.0;
        return J;
    }

    Eigen::VectorXd last_basis_vector() const {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e(n - 1) = 1.0;
        return e;
    }
};

} // namespace pnfbar
