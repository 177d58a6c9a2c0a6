#include "linemap/random.hpp"

namespace linemap {

std::uint64_t SplitMix64::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

Matrix SplitMix64::uniform_matrix(int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = uniform(-1.0, 1.0);
  }
  return m;
}

Vector SplitMix64::uniform_vector(int size) {
  Vector v(size);
  for (int i = 0; i < size; ++i) v(i) = uniform(-1.0, 1.0);
  return v;
}

Matrix SplitMix64::symmetric_matrix(int size, double shift) {
  const Matrix a = uniform_matrix(size, size);
  Matrix s = a + a.transpose();
  s.diagonal().array() += shift;
  return s;
}

Matrix SplitMix64::positive_definite_matrix(int size) {
  const Matrix b = uniform_matrix(size, size);
  Matrix g = b.transpose() * b;
  g.diagonal().array() += static_cast<double>(size);
  return g;
}

}  // namespace linemap
