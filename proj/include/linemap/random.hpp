#pragma once

#include <cstdint>

#include "linemap/linalg.hpp"

namespace linemap {

// SplitMix64 (Steele, Lea, Flood 2014): state += 0x9E3779B97F4A7C15, then the
// two xor-shift-multiply rounds with 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
// Doubles take the top 53 bits: u = (x >> 11) * 2^-53 in [0, 1).
// Matrices are filled in row-major order so draws port across languages.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double next_unit();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Entries uniform in [-1, 1), row-major fill.
  Matrix uniform_matrix(int rows, int cols);
  Vector uniform_vector(int size);

  // uniform_matrix + uniform_matrix^T, then shifted by `shift` * I.
  Matrix symmetric_matrix(int size, double shift = 0.0);

  // B^T B + size * I: positive definite with a modest condition number.
  Matrix positive_definite_matrix(int size);

 private:
  std::uint64_t state_;
};

}  // namespace linemap
