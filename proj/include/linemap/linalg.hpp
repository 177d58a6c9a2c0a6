#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string_view>

namespace linemap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A matrix-valued function of the affine parameter.
using MatrixFunction = std::function<Matrix(double)>;

// Condition numbers above this are treated as singular by every inversion.
inline constexpr double kDefaultConditionLimit = 1e12;

// Largest |entry|; NaN if any entry is NaN.
double max_abs(const Matrix& m);

// Largest |a - b| entrywise. Size error on shape mismatch.
double max_abs_diff(const Matrix& a, const Matrix& b);

// 2-norm condition number (ratio of extreme singular values); +inf if singular.
double condition_number(const Matrix& m);

// Inverse of a square matrix, or a conditioning error naming `what` when the
// condition number exceeds `limit`.
Matrix checked_inverse(const Matrix& m, std::string_view what, double limit = kDefaultConditionLimit);

// [[0, I], [-I, 0]] with n x n blocks.
Matrix symplectic_matrix(int n);

bool all_finite(const Matrix& m);

}  // namespace linemap
