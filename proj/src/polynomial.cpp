#include "linemap/polynomial.hpp"

#include <algorithm>

#include "linemap/error.hpp"

namespace linemap {

MatrixPolynomial::MatrixPolynomial(int rows, int cols) : rows_(rows), cols_(cols) {}

MatrixPolynomial::MatrixPolynomial(std::vector<Matrix> coeffs) : rows_(0), cols_(0), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw Error(ErrorKind::kUsage, "polynomial needs at least one coefficient");
  rows_ = static_cast<int>(coeffs_.front().rows());
  cols_ = static_cast<int>(coeffs_.front().cols());
  for (const Matrix& c : coeffs_) {
    require_size(c.rows(), rows_, "polynomial coefficient rows");
    require_size(c.cols(), cols_, "polynomial coefficient cols");
  }
}

MatrixPolynomial MatrixPolynomial::constant(const Matrix& value) {
  return MatrixPolynomial(std::vector<Matrix>{value});
}

Matrix MatrixPolynomial::operator()(double tau) const {
  Matrix acc = Matrix::Zero(rows_, cols_);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * tau + *it;
  return acc;
}

MatrixPolynomial MatrixPolynomial::derivative() const {
  if (coeffs_.size() <= 1) return MatrixPolynomial(rows_, cols_);
  std::vector<Matrix> out;
  out.reserve(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) out.push_back(coeffs_[k] * static_cast<double>(k));
  return MatrixPolynomial(std::move(out));
}

MatrixPolynomial MatrixPolynomial::running_integral(double lower) const {
  std::vector<Matrix> out;
  out.reserve(coeffs_.size() + 1);
  out.push_back(Matrix::Zero(rows_, cols_));
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    out.push_back(coeffs_[k] / static_cast<double>(k + 1));
  }
  MatrixPolynomial p(std::move(out));
  p.coeffs_[0] = -p(lower);
  return p;
}

MatrixPolynomial MatrixPolynomial::left_multiplied(const Matrix& m) const {
  require_size(m.cols(), rows_, "left multiplier cols");
  if (coeffs_.empty()) return MatrixPolynomial(static_cast<int>(m.rows()), cols_);
  std::vector<Matrix> out;
  out.reserve(coeffs_.size());
  for (const Matrix& c : coeffs_) out.push_back(m * c);
  return MatrixPolynomial(std::move(out));
}

MatrixPolynomial MatrixPolynomial::right_multiplied(const Matrix& m) const {
  require_size(m.rows(), cols_, "right multiplier rows");
  if (coeffs_.empty()) return MatrixPolynomial(rows_, static_cast<int>(m.cols()));
  std::vector<Matrix> out;
  out.reserve(coeffs_.size());
  for (const Matrix& c : coeffs_) out.push_back(c * m);
  return MatrixPolynomial(std::move(out));
}

MatrixPolynomial MatrixPolynomial::operator+(const MatrixPolynomial& other) const {
  require_size(other.rows_, rows_, "polynomial sum rows");
  require_size(other.cols_, cols_, "polynomial sum cols");
  const std::size_t len = std::max(coeffs_.size(), other.coeffs_.size());
  if (len == 0) return MatrixPolynomial(rows_, cols_);
  std::vector<Matrix> out(len, Matrix::Zero(rows_, cols_));
  for (std::size_t k = 0; k < coeffs_.size(); ++k) out[k] += coeffs_[k];
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) out[k] += other.coeffs_[k];
  return MatrixPolynomial(std::move(out));
}

MatrixPolynomial MatrixPolynomial::operator-(const MatrixPolynomial& other) const {
  return *this + other * -1.0;
}

MatrixPolynomial MatrixPolynomial::operator*(double s) const {
  if (coeffs_.empty()) return *this;
  std::vector<Matrix> out;
  out.reserve(coeffs_.size());
  for (const Matrix& c : coeffs_) out.push_back(c * s);
  return MatrixPolynomial(std::move(out));
}

double MatrixPolynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const Matrix& c : coeffs_) m = std::max(m, max_abs(c));
  return m;
}

MatrixFunction MatrixPolynomial::as_function() const {
  return [p = *this](double tau) { return p(tau); };
}

}  // namespace linemap
