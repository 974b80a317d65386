#pragma once

#include <Eigen/Dense>

namespace isingnet {

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations,
/// ascending. Only the upper triangle is read.
Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& symmetric, double tol = 1e-14, int max_sweeps = 100);

} // namespace isingnet
