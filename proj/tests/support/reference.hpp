#pragma once

// Slow, independent reference implementations used only by the tests.

#include <Eigen/Dense>

namespace reference {

/// Minimum of sum_i |x_i - y_perm(i)|^2 / m over all permutations
/// (equal-size uniform measures, rows are points).
double brute_force_ot_cost(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Standard normal CDF in long double via the series
/// Phi(x) = 1/2 + phi(x) sum_k x^(2k+1) / (2k+1)!!.
long double normal_cdf_series(long double x);

/// Inverse of normal_cdf_series by bisection on [-12, 12].
long double normal_quantile_bisect(long double t);

/// Classical two-sided Jacobi in long double, run until every off-diagonal
/// entry is below tol * |A|_F. Eigenvalues returned in descending order.
Eigen::VectorXd jacobi_eigenvalues_ld(const Eigen::MatrixXd& a, long double tol = 1e-14L);

/// min over rotations/reflections R and scales s of |A - s B R|_F^2 for
/// column-centered, unit-Frobenius A and B (n x 2), by a fine angle grid
/// followed by golden-section refinement.
double procrustes_grid(const Eigen::MatrixXd& y1, const Eigen::MatrixXd& y2);

}  // namespace reference
