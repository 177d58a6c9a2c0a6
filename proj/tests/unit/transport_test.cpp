#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "linemap/error.hpp"
#include "linemap/random.hpp"
#include "linemap/transport.hpp"

using namespace linemap;

namespace {

constexpr double kDense = 1e-13;

BlockMatrix random_block(SplitMix64& rng, int n) { return BlockMatrix(rng.uniform_matrix(2 * n, 2 * n)); }

}  // namespace

TEST(BlockMatrix, AssembleAndSplit) {
  SplitMix64 rng(1);
  const Matrix b1 = rng.uniform_matrix(3, 3), b2 = rng.uniform_matrix(3, 3);
  const Matrix b3 = rng.uniform_matrix(3, 3), b4 = rng.uniform_matrix(3, 3);
  const BlockMatrix m = BlockMatrix::assemble(b1, b2, b3, b4);
  EXPECT_EQ(m.n(), 3);
  EXPECT_EQ(m.b1(), b1);
  EXPECT_EQ(m.b2(), b2);
  EXPECT_EQ(m.b3(), b3);
  EXPECT_EQ(m.b4(), b4);
  EXPECT_EQ(m.dense().topRightCorner(3, 3), b2);
  EXPECT_THROW(BlockMatrix(Matrix::Zero(3, 3)), Error);
}

TEST(Transport, TRhsCases) {
  SplitMix64 rng(2);
  const auto j = StructureMatrix::symplectic(2);
  const BlockMatrix t = random_block(rng, 2);
  EXPECT_EQ(t_rhs(t, j, BlockMatrix::zero(2), j, BlockMatrix::zero(2)).dense(), Matrix::Zero(4, 4));

  const Matrix c = rng.uniform_matrix(4, 4), b = rng.uniform_matrix(4, 4);
  const BlockMatrix z = random_block(rng, 2), ybar = random_block(rng, 2);
  const Matrix expected = b * ybar.dense() * t.dense() - t.dense() * c * z.dense();
  const Matrix got =
      t_rhs(t, StructureMatrix::general(c), z, StructureMatrix::general(b), ybar).dense();
  EXPECT_LE(max_abs_diff(got, expected), kDense);
}

TEST(Transport, TRhsBlockEquationsForFlatStructure) {
  // Ybar = {0,0,0,Y4}, Z = {0,0,0,Z4}, B = C = J:
  // T1' = Y4 T3, T2' = Y4 T4 - T1 Z4, T3' = 0, T4' = -T3 Z4
  SplitMix64 rng(3);
  const int n = 3;
  const Matrix y4 = rng.symmetric_matrix(n), z4 = rng.symmetric_matrix(n);
  const Matrix zero = Matrix::Zero(n, n);
  const BlockMatrix ybar = BlockMatrix::assemble(zero, zero, zero, y4);
  const BlockMatrix z = BlockMatrix::assemble(zero, zero, zero, z4);
  const BlockMatrix t = random_block(rng, n);
  const auto j = StructureMatrix::symplectic(n);
  const BlockMatrix d = t_rhs(t, j, z, j, ybar);
  EXPECT_LE(max_abs_diff(d.b1(), y4 * t.b3()), kDense);
  EXPECT_LE(max_abs_diff(d.b2(), y4 * t.b4() - t.b1() * z4), kDense);
  EXPECT_LE(max_abs_diff(d.b3(), zero), kDense);
  EXPECT_LE(max_abs_diff(d.b4(), -t.b3() * z4), kDense);
}

TEST(Transport, RRhsCases) {
  SplitMix64 rng(4);
  const int n = 2;
  const auto j = StructureMatrix::symplectic(n);
  CoefficientSet zero{Matrix::Zero(4, 4), Matrix::Zero(4, 4), Vector::Zero(4), Vector::Zero(4)};
  const Vector r = rng.uniform_vector(4);
  const BlockMatrix t = random_block(rng, n);
  EXPECT_EQ(r_rhs(t, Vector::Zero(4), j, j, zero, Reparameterization::identity(), 0.0), Vector::Zero(4));

  CoefficientSet only_e = zero;
  only_e.ybar = rng.symmetric_matrix(4);
  only_e.ebar = rng.uniform_vector(4);
  const Vector got = r_rhs(BlockMatrix::zero(n), r, j, j, only_e, Reparameterization::identity(), 0.3);
  EXPECT_LE((got - j.value() * (only_e.ybar * r + only_e.ebar)).cwiseAbs().maxCoeff(), kDense);

  CoefficientSet full{rng.symmetric_matrix(4), rng.symmetric_matrix(4), rng.uniform_vector(4), rng.uniform_vector(4)};
  const Matrix c = rng.uniform_matrix(4, 4), k = rng.uniform_matrix(4, 4);
  const auto rep = Reparameterization::linear(1.5);
  const Vector expected = k * (full.ybar * r + 1.5 * full.ebar) - t.dense() * c * full.gbar;
  const Vector dense = r_rhs(t, r, StructureMatrix::general(c), StructureMatrix::general(k), full, rep, 0.2);
  EXPECT_LE((dense - expected).cwiseAbs().maxCoeff(), kDense);
}

TEST(Transport, SRhsReducesWhenDCancels) {
  SplitMix64 rng(5);
  const int n = 2;
  const auto j = StructureMatrix::symplectic(n);
  const BlockMatrix s = random_block(rng, n), a = random_block(rng, n), f = random_block(rng, n);
  const BlockMatrix ybar(rng.symmetric_matrix(4));
  EXPECT_EQ(s_rhs(s, j, BlockMatrix::zero(n)).dense(), Matrix::Zero(4, 4));
  const BlockMatrix d(-(s.dense() * a.dense() * f.dense()));
  EXPECT_LE(max_abs_diff(s_rhs(s, j, ybar, SExtra{d, a, f}).dense(), s_rhs(s, j, ybar).dense()), kDense);

  const BlockMatrix dr = random_block(rng, n);
  const Matrix b = rng.uniform_matrix(4, 4);
  const Matrix expected = b * ybar.dense() * s.dense() + dr.dense() + s.dense() * a.dense() * f.dense();
  EXPECT_LE(max_abs_diff(s_rhs(s, StructureMatrix::general(b), ybar, SExtra{dr, a, f}).dense(), expected), kDense);
}

TEST(Transport, RRiccatiRhsReducesWhenECancels) {
  SplitMix64 rng(6);
  const int n = 2;
  const auto j = StructureMatrix::symplectic(n);
  const BlockMatrix r = random_block(rng, n), a = random_block(rng, n), g = random_block(rng, n);
  const BlockMatrix z(rng.symmetric_matrix(4));
  EXPECT_EQ(r_riccati_rhs(r, j, BlockMatrix::zero(n)).dense(), Matrix::Zero(4, 4));
  const BlockMatrix e(-(g.dense() * a.dense() * r.dense()));
  EXPECT_LE(max_abs_diff(r_riccati_rhs(r, j, z, RExtra{e, g, a}).dense(), r_riccati_rhs(r, j, z).dense()), kDense);

  const BlockMatrix er = random_block(rng, n);
  const Matrix c = rng.uniform_matrix(4, 4);
  const Matrix expected = -r.dense() * c * z.dense() + er.dense() + g.dense() * a.dense() * r.dense();
  EXPECT_LE(max_abs_diff(r_riccati_rhs(r, StructureMatrix::general(c), z, RExtra{er, g, a}).dense(), expected),
            kDense);
}

TEST(Integrate, ConstantAndExponential) {
  SplitMix64 rng(7);
  const Matrix m = rng.uniform_matrix(3, 3);
  const Trajectory flat = integrate([](const Matrix& x, double) -> Matrix { return Matrix::Zero(x.rows(), x.cols()); },
                                    m, 0.0, 1.0, 10);
  ASSERT_EQ(flat.size(), 11u);
  for (const auto& p : flat) EXPECT_EQ(p.value, m);
  EXPECT_EQ(flat.front().tau, 0.0);
  EXPECT_EQ(flat.back().tau, 1.0);

  const Trajectory e = integrate([](const Matrix& x, double) -> Matrix { return x; }, Matrix::Ones(1, 1), 0.0, 1.0,
                                 1000);
  EXPECT_NEAR(e.back().value(0, 0), std::exp(1.0), 1e-10);
}

TEST(Integrate, FourthOrderConvergence) {
  // x' = tau^4 x has no polynomial solution, so RK4 truncation is visible
  const MatrixRhs rhs = [](const Matrix& x, double tau) -> Matrix { return 3.0 * std::pow(tau, 4) * x; };
  const double exact = std::exp(3.0 / 5.0);
  const double e1 = std::fabs(integrate(rhs, Matrix::Ones(1, 1), 0.0, 1.0, 20).back().value(0, 0) - exact);
  const double e2 = std::fabs(integrate(rhs, Matrix::Ones(1, 1), 0.0, 1.0, 40).back().value(0, 0) - exact);
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Integrate, DivergenceNamesTau) {
  const MatrixRhs blowup = [](const Matrix& x, double) -> Matrix { return x.array().square().matrix() * 1e100; };
  try {
    integrate(blowup, Matrix::Ones(1, 1), 0.0, 1.0, 100);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDivergence);
    EXPECT_NE(std::string(e.what()).find("tau"), std::string::npos);
  }
  EXPECT_THROW(integrate(blowup, Matrix::Ones(1, 1), 0.0, 1.0, 0), Error);
}

TEST(ComposeT, Cases) {
  SplitMix64 rng(8);
  const int n = 3;
  const BlockMatrix id = BlockMatrix::identity(n);
  EXPECT_EQ(compose_T(id, id, id).dense(), Matrix::Identity(6, 6));
  const BlockMatrix s = random_block(rng, n), a = random_block(rng, n), r = random_block(rng, n);
  EXPECT_EQ(compose_T(s, BlockMatrix::zero(n), r).dense(), Matrix::Zero(6, 6));
  const Matrix dense = s.dense() * a.dense() * r.dense();
  EXPECT_LE(max_abs_diff(compose_T(s, a, r).dense(), dense), kDense);
  EXPECT_LE(max_abs_diff(compose_T_blockwise(s, a, r).dense(), dense), kDense);
}

TEST(Differentiate, ExactOnLowDegree) {
  Trajectory quad, quart;
  for (int k = 0; k <= 20; ++k) {
    const double tau = 0.05 * k;
    quad.push_back({tau, Matrix::Constant(1, 1, 3 * tau * tau - tau)});
    quart.push_back({tau, Matrix::Constant(1, 1, std::pow(tau, 4))});
  }
  const Trajectory d2 = differentiate(quad);
  ASSERT_EQ(d2.size(), 19u);
  for (const auto& p : d2) EXPECT_NEAR(p.value(0, 0), 6 * p.tau - 1, 1e-12);
  const Trajectory d4 = differentiate(quart, Differencing::kFourthOrder);
  ASSERT_EQ(d4.size(), 17u);
  for (const auto& p : d4) EXPECT_NEAR(p.value(0, 0), 4 * std::pow(p.tau, 3), 1e-11);
}

TEST(TransportResidual, ZeroAndIntegrated) {
  const auto j = StructureMatrix::symplectic(2);
  SplitMix64 rng(9);
  const Matrix t0 = rng.uniform_matrix(4, 4);
  const MatrixFunction zero = [](double) -> Matrix { return Matrix::Zero(4, 4); };
  Trajectory constant;
  for (int k = 0; k <= 10; ++k) constant.push_back({0.1 * k, t0});
  EXPECT_EQ(transport_residual(constant, j, zero, j, zero), 0.0);

  // unit-scale coefficients; the residual is limited by second-order differencing
  const Matrix z = 0.25 * rng.symmetric_matrix(4), y = 0.25 * rng.symmetric_matrix(4);
  const MatrixFunction zf = [&](double) { return z; }, yf = [&](double) { return y; };
  const MatrixRhs rhs = [&](const Matrix& t, double) -> Matrix {
    return t_rhs(BlockMatrix(t), j, BlockMatrix(z), j, BlockMatrix(y)).dense();
  };
  const Trajectory traj = integrate(rhs, t0, 0.0, 1.0, 1000);
  EXPECT_LE(transport_residual(traj, j, zf, j, yf), 1e-6);
  // a wrong Z is visible
  const MatrixFunction wrong = [&](double) -> Matrix { return z + 0.01 * Matrix::Identity(4, 4); };
  EXPECT_GT(transport_residual(traj, j, wrong, j, yf), 1e-4);
}

TEST(Trajectory, CsvFormatAndDistance) {
  Trajectory t{{0.0, Matrix::Identity(2, 2)}, {0.5, 0.1 * Matrix::Ones(2, 2)}};
  std::ostringstream out;
  write_trajectory_csv(t, out);
  EXPECT_EQ(out.str(),
            "tau,m_0_0,m_0_1,m_1_0,m_1_1\n"
            "0,1,0,0,1\n"
            "0.5,0.10000000000000001,0.10000000000000001,0.10000000000000001,0.10000000000000001\n");
  Trajectory u = t;
  u[1].value(1, 0) += 0.25;
  EXPECT_DOUBLE_EQ(trajectory_distance(t, u), 0.25);
  u.pop_back();
  EXPECT_THROW(trajectory_distance(t, u), Error);
}
