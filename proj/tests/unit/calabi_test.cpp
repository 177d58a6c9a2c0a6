#include <cmath>

#include <gtest/gtest.h>

#include "linemap/calabi.hpp"
#include "linemap/error.hpp"
#include "linemap/random.hpp"

using namespace linemap;

namespace {

Vector point(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

MetricField sphere() {
  return MetricField(2, [](const Vector& x) {
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = 1.0;
    g(1, 1) = std::pow(std::sin(x(0)), 2);
    return g;
  });
}

}  // namespace

TEST(HessianMetric, Cases) {
  SplitMix64 rng(1);
  const MetricField q = hessian_metric(ScalarPotential::quadratic(3));
  for (int k = 0; k < 10; ++k) EXPECT_LE(max_abs_diff(q(rng.uniform_vector(3)), Matrix::Identity(3, 3)), 1e-8);
  // (1/2 |x|^2)^2 has a vanishing Hessian at the origin; the stencil leaves 2 h^2
  EXPECT_LE(max_abs(hessian_metric(ScalarPotential::quadratic(2), 2)(Vector::Zero(2))), 1e-6);
  EXPECT_LE(max_abs_diff(hessian_metric(ScalarPotential::pure_quartic(2))(point(1, 1)), 12.0 * Matrix::Identity(2, 2)),
            1e-6);
  const Matrix qf = rng.positive_definite_matrix(3);
  EXPECT_LE(max_abs_diff(hessian_metric(ScalarPotential::quadratic_form(qf))(rng.uniform_vector(3)), qf), 1e-6);
}

TEST(Potential, Validation) {
  EXPECT_THROW(ScalarPotential::quadratic(2)(Vector::Zero(3)), Error);
  const ScalarPotential bad("bad", 1, [](const Vector&) { return std::nan(""); });
  EXPECT_THROW(bad(Vector::Zero(1)), Error);
  EXPECT_THROW(MetricField(2, [](const Vector&) -> Matrix { return Matrix::Identity(3, 3); })(Vector::Zero(2)), Error);
}

TEST(Christoffel, ConstantMetricAndSymmetry) {
  const MetricField flat(3, [](const Vector&) -> Matrix { return 2.0 * Matrix::Identity(3, 3); });
  EXPECT_LE(christoffel_first(flat, point(0.1, 0.2).homogeneous()).max_abs(), 1e-9);

  const Tensor g = christoffel_first(hessian_metric(ScalarPotential::coupled_quartic(2, 0.1)), point(0.4, -0.3));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int m = 0; m < 2; ++m) EXPECT_EQ(g(i, j, m), g(j, i, m));
    }
  }
}

TEST(Christoffel, HessianThirdDerivatives) {
  // u = 1/2 |x|^2 + c sum x^4: d_i d_j d_m u = 24 c x_i when i = j = m
  const double c = 0.2;
  const Vector x = point(0.7, -0.4);
  const Tensor g = christoffel_first(hessian_metric(ScalarPotential::quartic(2, c)), x);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int m = 0; m < 2; ++m) {
        const double expected = (i == j && j == m) ? 12.0 * c * x(i) : 0.0;
        EXPECT_NEAR(g(i, j, m), expected, 1e-4);
      }
    }
  }
}

TEST(Riemann, FlatAndAntisymmetric) {
  SplitMix64 rng(2);
  const MetricField flat = hessian_metric(ScalarPotential::quadratic(3));
  EXPECT_LE(riemann(flat, rng.uniform_vector(3)).max_abs(), 1e-6);

  const MetricField g = hessian_metric(ScalarPotential::coupled_quartic(3, 0.3));
  const Tensor r = riemann(g, rng.uniform_vector(3));
  const double scale = std::max(1.0, r.max_abs());
  for (int a = 0; a < 3; ++a) {
    for (int m = 0; m < 3; ++m) {
      for (int s = 0; s < 3; ++s) {
        for (int v = 0; v < 3; ++v) EXPECT_LE(std::fabs(r(a, m, s, v) + r(a, m, v, s)), 1e-8 * scale);
      }
    }
  }
}

TEST(Riemann, SphereCurvature) {
  const Vector x = point(M_PI / 4, 0.3);
  EXPECT_NEAR(gaussian_curvature(sphere(), x), 1.0, 1e-4);
  // this ordering of the indices makes R_1212 = -sin^2 theta
  EXPECT_NEAR(lowered_riemann(sphere().jet(x))(0, 1, 0, 1), -0.5, 1e-4);
  // and the contraction R^a_{mav} = -K G
  EXPECT_LE(max_abs_diff(ricci(sphere(), x), -sphere()(x)), 1e-4);
  EXPECT_THROW(gaussian_curvature(hessian_metric(ScalarPotential::quadratic(3)), Vector::Zero(3)), Error);
}

TEST(Riemann, RicciSymmetricForHessianMetric) {
  const Matrix ric = ricci(hessian_metric(ScalarPotential::coupled_quartic(3, 0.2)), Vector::Constant(3, 0.4));
  EXPECT_LE(max_abs_diff(ric, ric.transpose()), 1e-6);
}

TEST(HessianIdentity, QuadraticBothSidesZero) {
  const HessianCurvatureReport r = hessian_curvature_check(ScalarPotential::quadratic(2), point(0.3, 0.2));
  EXPECT_LE(r.from_riemann.max_abs(), 1e-8);
  EXPECT_LE(r.from_identity.max_abs(), 1e-8);
  EXPECT_TRUE(r.pass);
}

TEST(HessianIdentity, CoupledQuartic) {
  const HessianCurvatureReport r =
      hessian_curvature_check(ScalarPotential::coupled_quartic(2, 0.1), point(0.3, 0.2));
  EXPECT_LE(r.max_difference, 1e-4);
  EXPECT_GT(r.min_eigenvalue, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(HessianIdentity, NonTrivialCurvatureAgrees) {
  SplitMix64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Vector x = 0.8 * rng.uniform_vector(2);
    const HessianCurvatureReport r = hessian_curvature_check(ScalarPotential::quartic(2, 0.5), x);
    EXPECT_LE(r.max_difference, 1e-4);
    EXPECT_TRUE(r.pass);
  }
  // u^2 gives a metric whose curvature is far from zero
  const HessianCurvatureReport sq = hessian_curvature_check(ScalarPotential::quartic(2, 0.5), point(0.9, 0.6), 2);
  EXPECT_GT(sq.from_riemann.max_abs(), 1e-2);
  EXPECT_LE(sq.max_difference, 1e-4 * std::max(1.0, sq.from_riemann.max_abs()));
}

TEST(HessianIdentity, FlippedProductDetected) {
  const HessianCurvatureReport r =
      hessian_curvature_check(ScalarPotential::coupled_quartic(2, 0.1), point(1.0, 0.9), 1, true);
  EXPECT_GE(r.max_difference, 1e-2);
  EXPECT_FALSE(r.pass);
}

TEST(HessianIdentity, IndefiniteMetricRefused) {
  const ScalarPotential saddle("saddle", 2, [](const Vector& x) { return x(0) * x(0) - x(1) * x(1); });
  try {
    hessian_curvature_check(saddle, point(0.2, 0.1));
    FAIL() << "expected a conditioning error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConditioning);
  }
}

TEST(LagrangianHamiltonian, Cases) {
  const LagrangianHamiltonian unit = calabi_lagrangian_hamiltonian(Matrix::Identity(2, 2), point(1, 0));
  EXPECT_EQ(unit.l, 1.0);
  EXPECT_EQ(unit.h, 1.0);
  const LagrangianHamiltonian rest = calabi_lagrangian_hamiltonian(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_EQ(rest.l, 0.0);
  EXPECT_EQ(rest.h, 0.0);
  SplitMix64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const LagrangianHamiltonian lh =
        calabi_lagrangian_hamiltonian(rng.positive_definite_matrix(3), rng.uniform_vector(3));
    EXPECT_LE(std::fabs(lh.l - lh.h), 1e-12 * std::max(1.0, std::fabs(lh.l)));
  }
}
