#include "linemap/linalg.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <sstream>

#include "linemap/error.hpp"
#include "linemap/simd/kernels.hpp"

namespace linemap {

namespace {
std::span<const double> view(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
}  // namespace

double max_abs(const Matrix& m) { return simd::max_abs(view(m)); }

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << "max_abs_diff: " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
    throw Error(ErrorKind::kSize, os.str());
  }
  return simd::max_abs_diff(view(a), view(b));
}

double condition_number(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

Matrix checked_inverse(const Matrix& m, std::string_view what, double limit) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::kSize, std::string(what) + ": inverse of a non-square matrix");
  }
  const double cond = condition_number(m);
  if (!(cond <= limit)) {
    std::ostringstream os;
    os << what << ": condition number " << cond << " exceeds " << limit;
    throw Error(ErrorKind::kConditioning, os.str());
  }
  return m.partialPivLu().inverse();
}

Matrix symplectic_matrix(int n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return j;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace linemap
