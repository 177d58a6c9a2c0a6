#pragma once

// Data-parallel inner loops used by the integrator, the residual norms and the
// signature-weighted quadratic forms. Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2 variant chosen at runtime.
//
// axpy and max_abs_diff are bit-identical across variants. weighted_dot
// reassociates the sum and agrees with the scalar reference to a few ulps of
// sum |w a b|.

#include <cstddef>
#include <span>
#include <string_view>

namespace linemap::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // sum_i w[i] * a[i] * b[i]
  double (*weighted_dot)(const double* w, const double* a, const double* b, std::size_t n);
  // max_i |a[i] - b[i]|
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  // max_i |a[i]|
  double (*max_abs)(const double* a, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in.
const KernelTable* avx2_kernels();

bool cpu_supports(Isa isa);

// Variant used by the public wrappers below. Chosen once from the CPU and the
// LINEMAP_SIMD environment variable ("scalar" or "avx2").
Isa active_isa();

// Overrides the runtime choice; throws if the CPU or the build lacks `isa`.
void force_isa(Isa isa);

const KernelTable& active_kernels();

void axpy(double a, std::span<const double> x, std::span<double> y);
double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> a);

}  // namespace linemap::simd
