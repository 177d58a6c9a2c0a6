#pragma once

// Flat coordinates Zbar = E u, the conformal factor exp(2 sigma) along a
// curve, the constant-curvature factor U, and the null embedding of an
// n-dimensional metric into an (n+2)-dimensional flat space.

#include <functional>
#include <string>
#include <vector>

#include "linemap/linalg.hpp"

namespace linemap {

// Frame E^(A)_Lambda(u) with G = E^T eta E.
class VielbeinField {
 public:
  using Frame = std::function<Matrix(const Vector&)>;

  VielbeinField(std::string name, std::vector<int> flat_signature, Frame frame);

  // E = I.
  static VielbeinField identity(std::vector<int> flat_signature);
  // E = diag(p_1(u^1), ..., p_n(u^n)) with p_i(x) = sum_k coeffs[i][k] x^k.
  static VielbeinField diagonal_polynomial(std::vector<int> flat_signature, std::vector<std::vector<double>> coeffs);
  // E = exp(c . u) I, a conformally flat metric exp(2 c.u) eta.
  static VielbeinField exponential_conformal(std::vector<int> flat_signature, Vector c);

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(signature_.size()); }
  const std::vector<int>& flat_signature() const { return signature_; }
  Matrix eta() const;

  // Size error on a wrong u length, domain error on non-finite entries.
  Matrix frame(const Vector& u) const;
  // E^{-1}; conditioning error above condition number 1e10.
  Matrix inverse_frame(const Vector& u) const;
  Matrix metric(const Vector& u) const;

 private:
  std::string name_;
  std::vector<int> signature_;
  Frame frame_;
};

inline constexpr double kFrameConditionLimit = 1e10;

// Samples of a curve u(s) with its tangent.
struct CurveSample {
  std::vector<double> s_values;  // strictly increasing, at least 3
  std::vector<Vector> u_points;
  std::vector<Vector> du_ds;

  std::size_t size() const { return s_values.size(); }
  void validate(int dim) const;
};

// Samples u(s) and u'(s) on a uniform grid of `points` values from s0 to s1.
CurveSample sample_curve(const std::function<Vector(double)>& u, const std::function<Vector(double)>& du_ds,
                         double s0, double s1, int points);

// d/ds of sampled values: three-point central differences inside, one-sided
// second-order three-point stencils at the two ends.
std::vector<Matrix> derivative_along(const std::vector<double>& s, const std::vector<Matrix>& values);

struct ConformalData {
  double sigma = 0.0;
  double phi = 0.0;
  double u_factor = 1.0;
  double curvature_k = 0.0;
};

struct SigmaProfile {
  std::vector<ConformalData> samples;
  std::vector<Vector> zbar;
  std::vector<Vector> zbar_dot;     // dZbar/ds by differencing
  std::vector<double> line_element;  // G u' u'
  // max over samples of |G u'u' - exp(2 sigma) eta Zbar'Zbar'| / |G u'u'|
  double flat_form_error = 0.0;
};

// Zbar = E(u) u.
Vector zbar(const VielbeinField& v, const Vector& u);
// u = E(u)^{-1} Zbar, evaluated with the frame at u.
Vector u_from_zbar(const VielbeinField& v, const Vector& u, const Vector& zbar_value);

// exp(-2 sigma) = 1 - (a^T G a + 2 a^T G b) / L with a = (dN/ds) Zbar,
// b = N dZbar/ds, N = E^{-1} and L = G u' u'. For unit-speed curves L = 1.
// Signature error naming s when the bracket is not positive or L = 0.
SigmaProfile sigma_along(const VielbeinField& v, const CurveSample& curve, double curvature_k = 0.0);

struct CurvatureFactor {
  double u_factor;
  double phi;
};

// U = 1 + K/4 eta Zbar Zbar and exp(2 phi) = U^-2. Singularity error at U = 0.
CurvatureFactor constant_curvature_factor(const Vector& z, const std::vector<int>& signature, double k);

// Two readings of the constant-curvature line element along the curve:
// literal    exp(2 phi) eta dZ dZ = exp(-2 sigma) G du du
// consistent exp(2 phi) eta dZ dZ = exp(2 phi) exp(-2 sigma) G du du
struct CurvatureFormReport {
  double literal_error = 0.0;
  double consistent_error = 0.0;
};

CurvatureFormReport curvature_form_check(const VielbeinField& v, const CurveSample& curve, double k);

// (eta_(A)(B), +1, -1)
std::vector<int> big_signature(const std::vector<int>& flat_signature);

struct EmbeddingPoint {
  Vector y;
  std::vector<int> big_signature;
};

// y^(A) = exp(sigma) E u, y^{n+1} = exp(sigma)(G u u - 1/4), y^{n+2} = exp(sigma)(G u u + 1/4).
EmbeddingPoint embed(const VielbeinField& v, const Vector& u, double sigma);

// eta_AB y^A y^B
double null_invariant(const EmbeddingPoint& p);

// dy/ds from Zbar, dZbar/ds, sigma and dsigma/ds.
Vector embed_velocity(const VielbeinField& v, const Vector& u, const Vector& zbar_dot, double sigma,
                      double sigma_dot);

struct LineElementReport {
  double max_rel_err_flatform = 0.0;   // exp(2 sigma) eta dZ dZ vs G du du
  double max_rel_err_embedding = 0.0;  // eta_AB dy dy vs G du du
};

// Compares the three forms of the line element at interior samples, all
// derivatives by central differences of the samples. `sigma_offset` is added
// to sigma before use (fault injection).
LineElementReport line_element_chain(const VielbeinField& v, const CurveSample& curve, double sigma_offset = 0.0);

struct MomentumSets {
  Vector p;        // p_Lambda = G u'
  Vector p_flat;   // P_(A) = eta Zbar'
  Vector p_embed;  // P_A = eta_AB y'
};

MomentumSets consistent_momenta(const VielbeinField& v, const Vector& u, const Vector& du_ds,
                                const Vector& zbar_dot, const Vector& y_dot);

struct ThreeHamiltonians {
  double q = 0.0;     // 1/2 G^{-1} p p
  double hhat = 0.0;  // 1/2 exp(2 sigma) eta P P
  double h = 0.0;     // 1/2 eta_AB P P
};

ThreeHamiltonians three_hamiltonians(const Matrix& metric, double sigma, const std::vector<int>& big_sig,
                                     const MomentumSets& momenta);

}  // namespace linemap
