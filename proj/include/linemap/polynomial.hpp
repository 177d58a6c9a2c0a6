#pragma once

#include <vector>

#include "linemap/linalg.hpp"

namespace linemap {

// p(tau) = sum_k coeffs[k] * tau^k with matrix coefficients of a fixed shape.
// Used for the arbitrary matrix functions of the Riccati family and for
// tau-dependent Hamiltonian coefficients; integrals are exact.
class MatrixPolynomial {
 public:
  static constexpr int kMaxConfigDegree = 8;

  MatrixPolynomial(int rows, int cols);  // the zero polynomial
  explicit MatrixPolynomial(std::vector<Matrix> coeffs);

  static MatrixPolynomial constant(const Matrix& value);
  static MatrixPolynomial zero(int rows, int cols) { return MatrixPolynomial(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  // -1 for the zero polynomial with no coefficients.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Matrix>& coeffs() const { return coeffs_; }

  Matrix operator()(double tau) const;

  MatrixPolynomial derivative() const;

  // P(tau) = integral of p from `lower` to tau; P(lower) = 0 exactly in exact
  // arithmetic (coefficient shift, then the constant term absorbs -P(lower)).
  MatrixPolynomial running_integral(double lower) const;

  MatrixPolynomial left_multiplied(const Matrix& m) const;   // m * p
  MatrixPolynomial right_multiplied(const Matrix& m) const;  // p * m

  MatrixPolynomial operator+(const MatrixPolynomial& other) const;
  MatrixPolynomial operator-(const MatrixPolynomial& other) const;
  MatrixPolynomial operator*(double s) const;

  // Largest |coefficient entry|.
  double max_abs_coeff() const;

  MatrixFunction as_function() const;

 private:
  int rows_;
  int cols_;
  std::vector<Matrix> coeffs_;
};

}  // namespace linemap
