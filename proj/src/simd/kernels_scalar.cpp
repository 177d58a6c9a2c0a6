#include <cmath>

#include "linemap/simd/kernels.hpp"

namespace linemap::simd {
namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = a * x[i];
    y[i] = y[i] + ax;
  }
}

double weighted_dot_scalar(const double* w, const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wa = w[i] * a[i];
    sum += wa * b[i];
  }
  return sum;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    // A poisoned residual must never read as small.
    if (std::isnan(d)) return d;
    if (d > m) m = d;
  }
  return m;
}

double max_abs_scalar(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(a[i]);
    if (std::isnan(d)) return d;
    if (d > m) m = d;
  }
  return m;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{&axpy_scalar, &weighted_dot_scalar, &max_abs_diff_scalar,
                                 &max_abs_scalar};
  return table;
}

}  // namespace linemap::simd
