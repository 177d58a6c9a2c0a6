#include <cmath>

#include <gtest/gtest.h>

#include "linemap/conformal_embed.hpp"
#include "linemap/error.hpp"
#include "linemap/random.hpp"

using namespace linemap;

namespace {

const std::vector<int> kLorentz{1, 1, 1, -1};

VielbeinField constant_frame(const Matrix& e, std::vector<int> sig = kLorentz) {
  return VielbeinField("constant", std::move(sig), [e](const Vector&) { return e; });
}

VielbeinField bump(double eps) {
  // diag(1 + eps u^1, 1, 1, 1)
  return VielbeinField::diagonal_polynomial(kLorentz, {{1.0, eps}, {1.0}, {1.0}, {1.0}});
}

CurveSample spacelike_curve(double step, double length = 0.2) {
  Vector u0(4), v(4), a(4);
  u0 << 0.1, 0.05, -0.05, -0.1;
  v << 1.0, 0.3, 0.3, 0.3;
  a << 0.3, 0.1, -0.1, -0.2;
  const int points = static_cast<int>(std::lround(length / step)) + 1;
  return sample_curve([=](double s) -> Vector { return u0 + s * v + 0.5 * s * s * a; },
                      [=](double s) -> Vector { return v + s * a; }, 0.0, length, points);
}

double max_line_error(const LineElementReport& r) {
  return std::max(r.max_rel_err_flatform, r.max_rel_err_embedding);
}

}  // namespace

TEST(Zbar, Cases) {
  SplitMix64 rng(1);
  const Vector u = rng.uniform_vector(4);
  EXPECT_EQ(zbar(VielbeinField::identity(kLorentz), u), u);
  Vector e1 = Vector::Zero(4);
  e1(0) = 1.0;
  EXPECT_EQ(zbar(constant_frame(2.0 * Matrix::Identity(4, 4)), e1), 2.0 * e1);
  for (int k = 0; k < 20; ++k) {
    const VielbeinField v = constant_frame(Matrix::Identity(4, 4) + 0.4 * rng.uniform_matrix(4, 4));
    const Vector x = rng.uniform_vector(4);
    EXPECT_LE((u_from_zbar(v, x, zbar(v, x)) - x).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Vielbein, MetricAndValidation) {
  SplitMix64 rng(2);
  const Matrix e = Matrix::Identity(4, 4) + 0.3 * rng.uniform_matrix(4, 4);
  const VielbeinField v = constant_frame(e);
  const Vector u = rng.uniform_vector(4);
  EXPECT_LE(max_abs_diff(v.metric(u), e.transpose() * v.eta() * e), 1e-14);
  EXPECT_THROW(v.frame(Vector::Zero(3)), Error);
  EXPECT_THROW(constant_frame(Matrix::Zero(4, 4)).inverse_frame(u), Error);
  const VielbeinField nan_frame("nan", kLorentz, [](const Vector&) -> Matrix {
    return Matrix::Constant(4, 4, std::nan(""));
  });
  EXPECT_THROW(nan_frame.frame(u), Error);
  // exp(c.u) I gives exp(2 c.u) eta
  Vector c(4);
  c << 0.1, -0.2, 0.0, 0.3;
  const VielbeinField ec = VielbeinField::exponential_conformal(kLorentz, c);
  EXPECT_LE(max_abs_diff(ec.metric(u), std::exp(2.0 * c.dot(u)) * ec.eta()), 1e-14);
}

TEST(Sigma, ConstantFrameIsFlat) {
  SplitMix64 rng(3);
  const VielbeinField v = constant_frame(Matrix::Identity(4, 4) + 0.2 * rng.uniform_matrix(4, 4));
  const SigmaProfile prof = sigma_along(v, spacelike_curve(1e-3));
  for (const ConformalData& d : prof.samples) {
    EXPECT_NEAR(d.sigma, 0.0, 1e-9);
    EXPECT_NEAR(std::exp(-2 * d.sigma) * std::exp(2 * d.sigma), 1.0, 1e-14);
  }
}

TEST(Sigma, DiagonalFrameFlatForm) {
  const SigmaProfile prof = sigma_along(bump(0.1), spacelike_curve(1e-3));
  EXPECT_LE(prof.flat_form_error, 1e-6);
  double max_sigma = 0.0;
  for (const ConformalData& d : prof.samples) max_sigma = std::max(max_sigma, std::fabs(d.sigma));
  EXPECT_GT(max_sigma, 1e-3);
}

TEST(Sigma, NullTangentIsRejected) {
  // u' = (1, 0, 0, 1) is null for (+, +, +, -)
  const CurveSample c = sample_curve([](double s) -> Vector { return Vector::Constant(4, 0.0) + s * Vector::Unit(4, 0) + s * Vector::Unit(4, 3); },
                                     [](double) -> Vector { return Vector::Unit(4, 0) + Vector::Unit(4, 3); }, 0.0, 0.1,
                                     11);
  try {
    sigma_along(VielbeinField::identity(kLorentz), c);
    FAIL() << "expected a signature error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSignature);
  }
}

TEST(CurvatureFactor, Cases) {
  const CurvatureFactor flat = constant_curvature_factor(Vector::Constant(4, 0.3), kLorentz, 0.0);
  EXPECT_EQ(flat.u_factor, 1.0);
  EXPECT_EQ(flat.phi, 0.0);
  Vector z = Vector::Zero(4);
  z(0) = 1.0;
  const CurvatureFactor k4 = constant_curvature_factor(z, kLorentz, 4.0);
  EXPECT_DOUBLE_EQ(k4.u_factor, 2.0);
  EXPECT_DOUBLE_EQ(std::exp(2 * k4.phi), 0.25);
  try {
    constant_curvature_factor(z, kLorentz, -4.0);
    FAIL() << "expected a singularity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSingularity);
  }
}

TEST(CurvatureForm, ConsistentReadingHolds) {
  const CurvatureFormReport r = curvature_form_check(bump(0.1), spacelike_curve(1e-3), 0.5);
  EXPECT_LE(r.consistent_error, 1e-6);
  // the printed reading misses the exp(2 phi) factor on the right
  EXPECT_GT(r.literal_error, 1e-3);
  const CurvatureFormReport flat = curvature_form_check(bump(0.1), spacelike_curve(1e-3), 0.0);
  EXPECT_LE(flat.literal_error, 1e-6);
}

TEST(Embed, OriginAndNullInvariant) {
  const EmbeddingPoint o = embed(VielbeinField::identity(kLorentz), Vector::Zero(4), 0.7);
  ASSERT_EQ(o.y.size(), 6);
  EXPECT_EQ(o.y.head(4), Vector::Zero(4));
  EXPECT_DOUBLE_EQ(o.y(4), -std::exp(0.7) / 4);
  EXPECT_DOUBLE_EQ(o.y(5), std::exp(0.7) / 4);
  EXPECT_EQ(null_invariant(o), 0.0);
  EXPECT_EQ(o.big_signature, (std::vector<int>{1, 1, 1, -1, 1, -1}));

  SplitMix64 rng(4);
  const VielbeinField frames[] = {VielbeinField::identity(kLorentz), bump(0.3),
                                  VielbeinField::exponential_conformal(kLorentz, Vector::Constant(4, 0.2))};
  for (int k = 0; k < 300; ++k) {
    const Vector u = rng.uniform_vector(4);
    const EmbeddingPoint p = embed(frames[k % 3], u, rng.uniform(-1.0, 1.0));
    EXPECT_LE(std::fabs(null_invariant(p)), 1e-10 * std::max(1.0, p.y.squaredNorm()));
  }
  EXPECT_THROW(embed(frames[0], Vector::Zero(4), std::nan("")), Error);
}

TEST(Embed, TwoDimensionalExpansion) {
  // E = I, sigma = 0, n = 2 Euclidean: with r = |u|^2 the extra coordinates are
  // r - 1/4 and r + 1/4, so eta y y = r + (r - 1/4)^2 - (r + 1/4)^2 = 0
  SplitMix64 rng(5);
  const VielbeinField v = VielbeinField::identity({1, 1});
  for (int k = 0; k < 10; ++k) {
    const Vector u = rng.uniform_vector(2);
    const double r = u.squaredNorm();
    const EmbeddingPoint p = embed(v, u, 0.0);
    EXPECT_DOUBLE_EQ(p.y(2), r - 0.25);
    EXPECT_DOUBLE_EQ(p.y(3), r + 0.25);
    const double direct = r + (r - 0.25) * (r - 0.25) - (r + 0.25) * (r + 0.25);
    EXPECT_NEAR(null_invariant(p), direct, 1e-15);
  }
}

TEST(LineElement, ConstantFrameExact) {
  SplitMix64 rng(6);
  const VielbeinField v = constant_frame(Matrix::Identity(4, 4) + 0.2 * rng.uniform_matrix(4, 4));
  EXPECT_LE(max_line_error(line_element_chain(v, spacelike_curve(1e-3))), 1e-10);
}

TEST(LineElement, SecondOrderRefinement) {
  const VielbeinField v = bump(0.1);
  const double coarse = max_line_error(line_element_chain(v, spacelike_curve(1e-3)));
  const double fine = max_line_error(line_element_chain(v, spacelike_curve(5e-4)));
  EXPECT_LE(coarse, 1e-5);
  EXPECT_GT(coarse / fine, 2.5);
  EXPECT_LT(coarse / fine, 6.0);
}

TEST(LineElement, WrongSigmaDetected) {
  const LineElementReport r = line_element_chain(bump(0.1), spacelike_curve(1e-3), 0.1);
  EXPECT_GE(r.max_rel_err_flatform, 1e-1);
}

TEST(ThreeHamiltonians, Cases) {
  const VielbeinField v = VielbeinField::identity(kLorentz);
  const MomentumSets zero{Vector::Zero(4), Vector::Zero(4), Vector::Zero(6)};
  const ThreeHamiltonians h0 = three_hamiltonians(v.metric(Vector::Zero(4)), 0.0, big_signature(kLorentz), zero);
  EXPECT_EQ(h0.q, 0.0);
  EXPECT_EQ(h0.hhat, 0.0);
  EXPECT_EQ(h0.h, 0.0);

  SplitMix64 rng(7);
  const Vector u = rng.uniform_vector(4), du = rng.uniform_vector(4);
  const Vector y_dot = embed_velocity(v, u, du, 0.0, 0.0);
  const MomentumSets m = consistent_momenta(v, u, du, du, y_dot);
  const ThreeHamiltonians h = three_hamiltonians(v.metric(u), 0.0, big_signature(kLorentz), m);
  const double half_l = 0.5 * du.dot(v.eta() * du);
  EXPECT_NEAR(h.q, half_l, 1e-14);
  EXPECT_NEAR(h.hhat, half_l, 1e-14);
  EXPECT_NEAR(h.h, half_l, 1e-14);
}

TEST(ThreeHamiltonians, CurvedFrameAgrees) {
  // along a sampled curve with a non-flat frame the three values agree to
  // differencing accuracy
  const VielbeinField v = bump(0.1);
  const CurveSample c = spacelike_curve(1e-3);
  const SigmaProfile prof = sigma_along(v, c);
  const std::size_t k = c.size() / 2;
  const double sigma = prof.samples[k].sigma;
  const double sigma_dot = (prof.samples[k + 1].sigma - prof.samples[k - 1].sigma) /
                           (c.s_values[k + 1] - c.s_values[k - 1]);
  const Vector y_dot = embed_velocity(v, c.u_points[k], prof.zbar_dot[k], sigma, sigma_dot);
  const MomentumSets m = consistent_momenta(v, c.u_points[k], c.du_ds[k], prof.zbar_dot[k], y_dot);
  const ThreeHamiltonians h = three_hamiltonians(v.metric(c.u_points[k]), sigma, big_signature(kLorentz), m);
  EXPECT_NEAR(h.q, h.hhat, 1e-5 * std::fabs(h.q));
  EXPECT_NEAR(h.q, h.h, 1e-5 * std::fabs(h.q));
}
