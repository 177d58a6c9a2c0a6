#include <cmath>

#include <gtest/gtest.h>

#include "linemap/error.hpp"
#include "linemap/phase_space.hpp"
#include "linemap/random.hpp"

using namespace linemap;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<long>(v.size()));
  long i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Vector fd_gradient(const QuadraticHamiltonian& h, const Vector& x, double tau) {
  const double step = 1e-5 * std::max(1.0, x.cwiseAbs().maxCoeff());
  Vector g(x.size());
  for (long l = 0; l < x.size(); ++l) {
    Vector plus = x, minus = x;
    plus(l) += step;
    minus(l) -= step;
    g(l) = (evaluate(h, PhaseVector(plus), tau) - evaluate(h, PhaseVector(minus), tau)) / (2 * step);
  }
  return g;
}

// H(xi) = H0 + sum_k xi^k Hk with symmetric Hk: linear state dependence
struct LinearStateH {
  Matrix h0;
  std::vector<Matrix> hk;

  QuadraticHamiltonian make(const Vector& g) const {
    const int n = static_cast<int>(h0.rows() / 2);
    auto self = *this;
    return QuadraticHamiltonian::state_dependent(
        n,
        [self](double, const Vector& x) {
          Matrix m = self.h0;
          for (std::size_t k = 0; k < self.hk.size(); ++k) m += x(static_cast<long>(k)) * self.hk[k];
          return m;
        },
        [self](double, const Vector&) { return self.hk; }, [g](double) { return g; });
  }
};

}  // namespace

TEST(PhaseSpace, EvaluateSmallCases) {
  EXPECT_DOUBLE_EQ(evaluate(QuadraticHamiltonian::constant(Matrix::Identity(2, 2)), PhaseVector(vec({1, 1})), 0.0),
                   1.0);
  QuadraticHamiltonian scalar_only(
      1, [](double) -> Matrix { return Matrix::Zero(2, 2); }, {}, [](double tau) { return tau; });
  EXPECT_DOUBLE_EQ(evaluate(scalar_only, PhaseVector(vec({0.3, -7})), 2.0), 2.0);
}

TEST(PhaseSpace, EvaluateMatchesTripleProduct) {
  SplitMix64 rng(1);
  const Matrix h = rng.symmetric_matrix(4);
  const Vector g = rng.uniform_vector(4);
  const Vector x = rng.uniform_vector(4);
  const double expected = 0.5 * x.dot(h * x) + g.dot(x) + 0.25;
  EXPECT_NEAR(evaluate(QuadraticHamiltonian::constant(h, g, 0.25), PhaseVector(x), 0.0), expected, 1e-14);
}

TEST(PhaseSpace, GradientCases) {
  EXPECT_EQ(gradient(QuadraticHamiltonian::constant(Matrix::Identity(2, 2)), PhaseVector(vec({3, 4})), 0.0),
            vec({3, 4}));
  EXPECT_EQ(gradient(QuadraticHamiltonian::constant(Matrix::Zero(2, 2), vec({1, 2})), PhaseVector(vec({5, 6})), 0.0),
            vec({1, 2}));
}

TEST(PhaseSpace, GradientMatchesFiniteDifferences) {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto h = QuadraticHamiltonian::constant(rng.symmetric_matrix(6), rng.uniform_vector(6), 0.5);
    const Vector x = rng.uniform_vector(6);
    EXPECT_LE((gradient(h, PhaseVector(x), 0.0) - fd_gradient(h, x, 0.0)).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(PhaseSpace, StateDependentGradientMatchesFiniteDifferences) {
  SplitMix64 rng(3);
  LinearStateH lin{rng.symmetric_matrix(4), {}};
  for (int k = 0; k < 4; ++k) lin.hk.push_back(0.3 * rng.symmetric_matrix(4));
  const auto h = lin.make(rng.uniform_vector(4));
  const Vector x = rng.uniform_vector(4);
  EXPECT_LE((gradient(h, PhaseVector(x), 0.0) - fd_gradient(h, x, 0.0)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(PhaseSpace, FlowCases) {
  const auto h = QuadraticHamiltonian::constant(Matrix::Identity(2, 2));
  EXPECT_EQ(flow_rhs(StructureMatrix::symplectic(1), h, PhaseVector(vec({2, 5})), 0.0), vec({5, -2}));
  EXPECT_EQ(flow_rhs(StructureMatrix::general(Matrix::Zero(2, 2)), h, PhaseVector(vec({2, 5})), 0.0),
            Vector::Zero(2));

  SplitMix64 rng(4);
  const Matrix c = rng.uniform_matrix(6, 6);
  const auto hr = QuadraticHamiltonian::constant(rng.symmetric_matrix(6), rng.uniform_vector(6));
  const Vector x = rng.uniform_vector(6);
  const Vector expected = c * gradient(hr, PhaseVector(x), 0.0);
  EXPECT_LE((flow_rhs(StructureMatrix::general(c), hr, PhaseVector(x), 0.0) - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PhaseSpace, SymplecticStructure) {
  const Matrix j = StructureMatrix::symplectic(3).value();
  EXPECT_EQ(j * j, -Matrix::Identity(6, 6));
  EXPECT_EQ(j.transpose(), -j);
  EXPECT_EQ(j, symplectic_matrix(3));
}

TEST(PhaseSpace, CoefficientSetConstant) {
  SplitMix64 rng(5);
  const Matrix h = rng.symmetric_matrix(4);
  const auto ham = QuadraticHamiltonian::constant(h);
  const PhaseVector x(rng.uniform_vector(4));
  const auto source = coefficient_set(ham, x, 0.3, Reparameterization::identity(), Side::kSource);
  EXPECT_EQ(source.zmat, h);
  EXPECT_EQ(source.gbar, Vector::Zero(4));
  const auto target = coefficient_set(ham, x, 0.3, Reparameterization::linear(2.0), Side::kTarget);
  EXPECT_EQ(target.ybar, 2.0 * h);
}

TEST(PhaseSpace, CoefficientSetStateDependentAssembly) {
  // Xbar xi + G reproduces the gradient, so Xbar is checked against finite
  // differences of the Hamiltonian rather than against its own formula.
  SplitMix64 rng(6);
  LinearStateH lin{rng.symmetric_matrix(2), {0.4 * rng.symmetric_matrix(2), 0.4 * rng.symmetric_matrix(2)}};
  const Vector g = rng.uniform_vector(2);
  const auto h = lin.make(g);
  const Vector x = rng.uniform_vector(2);
  const auto cs = coefficient_set(h, PhaseVector(x), 0.0, Reparameterization::identity(), Side::kSource);
  EXPECT_LE((cs.zmat * x + cs.gbar - fd_gradient(h, x, 0.0)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(PhaseSpace, StateDependentWithoutDerivativeRefused) {
  const auto h = QuadraticHamiltonian::state_dependent(
      1, [](double, const Vector& x) -> Matrix { return (1.0 + x(0) * x(0)) * Matrix::Identity(2, 2); });
  try {
    coefficient_set(h, PhaseVector(vec({1, 0})), 0.0, Reparameterization::identity(), Side::kSource);
    FAIL() << "expected a capability error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCapability);
  }
}

TEST(PhaseSpace, Validation) {
  EXPECT_THROW(PhaseVector(Vector::Zero(3)), Error);
  EXPECT_THROW(PhaseVector(Vector::Zero(0)), Error);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 1.0;
  EXPECT_THROW(evaluate(QuadraticHamiltonian::constant(asym), PhaseVector(vec({1, 1})), 0.0), Error);
  EXPECT_THROW(evaluate(QuadraticHamiltonian::constant(Matrix::Identity(4, 4)), PhaseVector(vec({1, 1})), 0.0),
               Error);
}

TEST(PhaseSpace, ReparameterizationsAreConsistent) {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(0.05 * k);
  for (const auto& rep : {Reparameterization::identity(), Reparameterization::linear(3.0),
                          Reparameterization::exponential(2.0), Reparameterization::polynomial({0.0, 1.0, 0.5})}) {
    EXPECT_LE(reparameterization_consistency(rep, grid), 1e-8) << rep.name();
  }
  const auto e = Reparameterization::exponential(2.0);
  EXPECT_DOUBLE_EQ(e.t_of_tau(0.0), 0.0);
  EXPECT_DOUBLE_EQ(e.dt_dtau(0.0), 1.0);
}

TEST(PhaseSpace, PolynomialHamiltonian) {
  std::vector<Matrix> c{Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)};
  const auto h = QuadraticHamiltonian::from_polynomials(MatrixPolynomial(c), std::nullopt, {0.0, 1.0});
  // 1/2 (1 + 2 tau) |x|^2 + tau at tau = 0.5, x = (1, 1)
  EXPECT_NEAR(evaluate(h, PhaseVector(vec({1, 1})), 0.5), 2.5, 1e-15);
}

TEST(Polynomial, RunningIntegralAndDerivative) {
  SplitMix64 rng(8);
  std::vector<Matrix> c;
  for (int k = 0; k < 4; ++k) c.push_back(rng.uniform_matrix(2, 3));
  const MatrixPolynomial p(c);
  const MatrixPolynomial big = p.running_integral(0.25);
  EXPECT_LE(max_abs(big(0.25)), 1e-15);
  EXPECT_LE(max_abs_diff(big.derivative()(0.7), p(0.7)), 1e-14);
  // Simpson on a cubic is exact
  const Matrix simpson = (p(0.25) + 4.0 * p(0.625) + p(1.0)) * (0.75 / 6.0);
  EXPECT_LE(max_abs_diff(big(1.0), simpson), 1e-14);
}
