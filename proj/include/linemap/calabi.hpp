#pragma once

// Hessian (Calabi) metrics G_ij = d_i d_j u^p, Christoffel symbols, Riemann
// and Ricci curvature by finite differences, the Hessian curvature identity,
// and L = H for the associated quadratic Lagrangian.
//
// Curvature convention: R^a_{m s v} = d_v Gamma^a_{ms} - d_s Gamma^a_{mv}
// + Gamma^e_{ms} Gamma^a_{ev} - Gamma^e_{mv} Gamma^a_{se}, which is the
// negative of the common (MTW) ordering. The unit sphere therefore has
// R_1212 = -sin^2(theta) and Gaussian curvature K = -R_1212 / det G.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "linemap/linalg.hpp"

namespace linemap {

// Dense n^rank array, last index fastest.
class Tensor {
 public:
  Tensor(int n, int rank);

  int n() const { return n_; }
  int rank() const { return rank_; }
  const std::vector<double>& data() const { return data_; }

  double& operator()(int i, int j, int k) { return data_[index3(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index3(i, j, k)]; }
  double& operator()(int i, int j, int k, int l) { return data_[index4(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[index4(i, j, k, l)]; }

  double max_abs() const;

 private:
  std::size_t index3(int i, int j, int k) const;
  std::size_t index4(int i, int j, int k, int l) const;

  int n_;
  int rank_;
  std::vector<double> data_;
};

// Largest |a - b| entrywise; size error when shapes differ.
double max_abs_diff(const Tensor& a, const Tensor& b);

class ScalarPotential {
 public:
  using Fn = std::function<double(const Vector&)>;

  ScalarPotential(std::string name, int dim, Fn eval);

  // 1/2 |x|^2
  static ScalarPotential quadratic(int dim);
  // 1/2 x^T Q x (Q symmetric positive definite)
  static ScalarPotential quadratic_form(const Matrix& q);
  // 1/2 |x|^2 + c sum x_i^4
  static ScalarPotential quartic(int dim, double c);
  // 1/2 |x|^2 + eps sum_{i<j} x_i^2 x_j^2
  static ScalarPotential coupled_quartic(int dim, double eps);
  // sum x_i^4 (degenerate at the coordinate hyperplanes)
  static ScalarPotential pure_quartic(int dim);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  // Domain error when not finite, size error on a wrong length.
  double operator()(const Vector& x) const;

 private:
  std::string name_;
  int dim_;
  Fn eval_;
};

// G, dG[k] = d_k G and ddG[k * n + l] = d_k d_l G at one point.
struct MetricJet {
  Matrix g;
  std::vector<Matrix> dg;
  std::vector<Matrix> ddg;
};

class MetricField {
 public:
  using Fn = std::function<Matrix(const Vector&)>;
  using JetFn = std::function<MetricJet(const Vector&)>;

  // Without `jet`, derivatives are central differences of `eval`
  // (h1 = 1e-5 scale for dG, product stencil h2 = 3e-4 scale for ddG).
  MetricField(int dim, Fn eval, JetFn jet = {});

  int dim() const { return dim_; }
  // Symmetrized; size error on shape, domain error on non-finite entries.
  Matrix operator()(const Vector& x) const;
  MetricJet jet(const Vector& x) const;

 private:
  int dim_;
  Fn eval_;
  JetFn jet_;
};

inline constexpr double kSecondStep = 3e-4;
inline constexpr double kFirstStep = 1e-5;
inline constexpr double kThirdStep = 1e-3;
inline constexpr double kFourthStep = 1e-2;

// Steps scale with max(1, |x|_inf).
double step_scale(const Vector& x);

// G_ij = d_i d_j (u^power) by the product central stencil with h2. The jet
// differentiates u^power directly: third derivatives with h3 and fourth with h4.
MetricField hessian_metric(const ScalarPotential& u, int power = 1);

// Mixed partial d_{i1}...d_{ik} of f at x by the k-fold product central stencil.
double product_stencil(const ScalarPotential::Fn& f, const Vector& x, const std::vector<int>& axes, double h);

// Gamma_ijm = 1/2 (d_i G_jm + d_j G_im - d_m G_ij)
Tensor christoffel_first(const MetricJet& jet);
Tensor christoffel_first(const MetricField& g, const Vector& x);
// Gamma^a_ij
Tensor christoffel_second(const MetricJet& jet);

// R^a_{msv}, index order (a, m, s, v); conditioning error on a singular metric.
Tensor riemann(const MetricJet& jet);
Tensor riemann(const MetricField& g, const Vector& x);
// R_{hijk} = G_{ha} R^a_{ijk}
Tensor lowered_riemann(const MetricJet& jet);
// R_mv = R^a_{mav}
Matrix ricci(const MetricJet& jet);
Matrix ricci(const MetricField& g, const Vector& x);
// Two dimensions only.
double gaussian_curvature(const MetricField& g, const Vector& x);

struct HessianCurvatureReport {
  Tensor from_riemann;   // G_ha R^a_ijk
  Tensor from_identity;  // -G^lm (Gamma_ijm Gamma_hkl - Gamma_ikm Gamma_hjl)
  double max_difference = 0.0;
  double tolerance = 1e-4;
  bool pass = false;
  double min_eigenvalue = 0.0;
};

// Compares the two forms of the curvature of a Hessian metric. The identity
// side carries a minus sign for the curvature convention above.
// `flip_second_product` changes the sign of the second product (fault injection).
HessianCurvatureReport hessian_curvature_check(const ScalarPotential& u, const Vector& x, int power = 1,
                                               bool flip_second_product = false, double tolerance = 1e-4);

struct LagrangianHamiltonian {
  double l = 0.0;
  double h = 0.0;
  double difference = 0.0;
};

// L = G v v and H = G^-1 p p with p = G v.
LagrangianHamiltonian calabi_lagrangian_hamiltonian(const Matrix& g, const Vector& velocity);

}  // namespace linemap
