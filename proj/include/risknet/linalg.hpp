#pragma once

#include <Eigen/Dense>

#include <span>

namespace risknet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// log(sum(exp(v))) with the maximum subtracted before exponentiating.
double log_sum_exp(const Vector& v);

/// Moore-Penrose pseudoinverse of a symmetric matrix through its
/// eigendecomposition. Eigenvalues below rel_cutoff * max|eigenvalue| are
/// treated as zero.
Matrix symmetric_pinv(const Matrix& a, double rel_cutoff = 1e-12);

/// Numerical rank of an arbitrary matrix (singular values above
/// rel_cutoff * largest).
int numerical_rank(const Matrix& a, double rel_cutoff = 1e-10);

double max_abs(const Matrix& a);

}  // namespace risknet
