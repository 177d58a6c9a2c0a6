#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "linemap/simd/kernels.hpp"

namespace linemap::simd {

#if defined(LINEMAP_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(LINEMAP_HAVE_AVX2)
  return &avx2_kernel_table();
#else
  return nullptr;
#endif
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2:
#if defined(LINEMAP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa detect() {
  if (const char* env = std::getenv("LINEMAP_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return Isa::kScalar;
    if (choice == "avx2" && cpu_supports(Isa::kAvx2)) return Isa::kAvx2;
  }
  return cpu_supports(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<int>& current() {
  static std::atomic<int> isa{static_cast<int>(detect())};
  return isa;
}

}  // namespace

Isa active_isa() { return static_cast<Isa>(current().load(std::memory_order_relaxed)); }

void force_isa(Isa isa) {
  if (!cpu_supports(isa)) {
    throw std::invalid_argument("kernel variant unavailable: " + std::string(to_string(isa)));
  }
  current().store(static_cast<int>(isa), std::memory_order_relaxed);
}

const KernelTable& active_kernels() {
  if (active_isa() == Isa::kAvx2) {
    if (const KernelTable* table = avx2_kernels()) return *table;
  }
  return scalar_kernels();
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  active_kernels().axpy(a, x.data(), y.data(), x.size());
}

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
  if (w.size() != a.size() || a.size() != b.size()) {
    throw std::invalid_argument("weighted_dot: length mismatch");
  }
  return active_kernels().weighted_dot(w.data(), a.data(), b.data(), w.size());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: length mismatch");
  return active_kernels().max_abs_diff(a.data(), b.data(), a.size());
}

double max_abs(std::span<const double> a) { return active_kernels().max_abs(a.data(), a.size()); }

}  // namespace linemap::simd
