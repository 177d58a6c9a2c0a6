#include "linemap/conformal_embed.hpp"

#include <cmath>
#include <sstream>

#include "linemap/error.hpp"

namespace linemap {

namespace {

void check_signature(const std::vector<int>& sig) {
  if (sig.empty()) throw Error(ErrorKind::kSize, "empty flat signature");
  for (int s : sig) {
    if (s != 1 && s != -1) throw Error(ErrorKind::kUsage, "flat signature entries must be +1 or -1");
  }
}

double eta_product(const std::vector<int>& sig, const Vector& a, const Vector& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    acc += sig[i] * a(static_cast<long>(i)) * b(static_cast<long>(i));
  }
  return acc;
}

std::string s_text(double s) {
  std::ostringstream os;
  os.precision(17);
  os << s;
  return os.str();
}

}  // namespace

VielbeinField::VielbeinField(std::string name, std::vector<int> flat_signature, Frame frame)
    : name_(std::move(name)), signature_(std::move(flat_signature)), frame_(std::move(frame)) {
  check_signature(signature_);
}

VielbeinField VielbeinField::identity(std::vector<int> flat_signature) {
  const long n = static_cast<long>(flat_signature.size());
  return VielbeinField("identity", std::move(flat_signature), [n](const Vector&) { return Matrix::Identity(n, n); });
}

VielbeinField VielbeinField::diagonal_polynomial(std::vector<int> flat_signature,
                                                 std::vector<std::vector<double>> coeffs) {
  require_size(static_cast<long>(coeffs.size()), static_cast<long>(flat_signature.size()),
               "diagonal polynomial count");
  const long n = static_cast<long>(flat_signature.size());
  return VielbeinField("diagonal-polynomial", std::move(flat_signature), [n, coeffs](const Vector& u) {
    Matrix e = Matrix::Zero(n, n);
    for (long i = 0; i < n; ++i) {
      double acc = 0.0;
      const auto& c = coeffs[static_cast<std::size_t>(i)];
      for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u(i) + *it;
      e(i, i) = acc;
    }
    return e;
  });
}

VielbeinField VielbeinField::exponential_conformal(std::vector<int> flat_signature, Vector c) {
  require_size(c.size(), static_cast<long>(flat_signature.size()), "conformal exponent length");
  const long n = c.size();
  return VielbeinField("exponential-conformal", std::move(flat_signature), [n, c](const Vector& u) -> Matrix {
    return std::exp(c.dot(u)) * Matrix::Identity(n, n);
  });
}

Matrix VielbeinField::eta() const {
  Matrix d = Matrix::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) d(i, i) = signature_[static_cast<std::size_t>(i)];
  return d;
}

Matrix VielbeinField::frame(const Vector& u) const {
  require_size(u.size(), dim(), "point dimension");
  Matrix e = frame_(u);
  require_size(e.rows(), dim(), "frame rows");
  require_size(e.cols(), dim(), "frame cols");
  if (!e.allFinite()) throw Error(ErrorKind::kDomain, "frame '" + name_ + "' is not finite");
  return e;
}

Matrix VielbeinField::inverse_frame(const Vector& u) const {
  return checked_inverse(frame(u), "frame '" + name_ + "'", kFrameConditionLimit);
}

Matrix VielbeinField::metric(const Vector& u) const {
  const Matrix e = frame(u);
  Matrix g = e.transpose() * eta() * e;
  return 0.5 * (g + g.transpose());
}

void CurveSample::validate(int dim) const {
  const std::size_t count = s_values.size();
  if (count < 3) throw Error(ErrorKind::kSize, "curve needs at least 3 samples");
  require_size(static_cast<long>(u_points.size()), static_cast<long>(count), "curve points");
  require_size(static_cast<long>(du_ds.size()), static_cast<long>(count), "curve tangents");
  for (std::size_t k = 0; k < count; ++k) {
    require_size(u_points[k].size(), dim, "curve point dimension");
    require_size(du_ds[k].size(), dim, "curve tangent dimension");
    if (k > 0 && !(s_values[k] > s_values[k - 1])) {
      throw Error(ErrorKind::kUsage, "curve parameter must increase");
    }
  }
}

CurveSample sample_curve(const std::function<Vector(double)>& u, const std::function<Vector(double)>& du_ds,
                         double s0, double s1, int points) {
  if (points < 3) throw Error(ErrorKind::kSize, "curve needs at least 3 samples");
  CurveSample c;
  const double h = (s1 - s0) / (points - 1);
  for (int k = 0; k < points; ++k) {
    const double s = (k + 1 == points) ? s1 : s0 + k * h;
    c.s_values.push_back(s);
    c.u_points.push_back(u(s));
    c.du_ds.push_back(du_ds(s));
  }
  return c;
}

std::vector<Matrix> derivative_along(const std::vector<double>& s, const std::vector<Matrix>& values) {
  const std::size_t count = s.size();
  if (count < 3) throw Error(ErrorKind::kSize, "differencing needs at least 3 samples");
  require_size(static_cast<long>(values.size()), static_cast<long>(count), "sample count");
  // derivative at x of the parabola through (x0, f0), (x1, f1), (x2, f2)
  auto stencil = [&](std::size_t i0, double x) -> Matrix {
    const double x0 = s[i0], x1 = s[i0 + 1], x2 = s[i0 + 2];
    const double w0 = (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
    const double w1 = (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
    const double w2 = (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    return w0 * values[i0] + w1 * values[i0 + 1] + w2 * values[i0 + 2];
  };
  std::vector<Matrix> out;
  out.reserve(count);
  out.push_back(stencil(0, s[0]));
  for (std::size_t k = 1; k + 1 < count; ++k) out.push_back(stencil(k - 1, s[k]));
  out.push_back(stencil(count - 3, s[count - 1]));
  return out;
}

Vector zbar(const VielbeinField& v, const Vector& u) { return v.frame(u) * u; }

Vector u_from_zbar(const VielbeinField& v, const Vector& u, const Vector& zbar_value) {
  require_size(zbar_value.size(), v.dim(), "Zbar dimension");
  return v.inverse_frame(u) * zbar_value;
}

CurvatureFactor constant_curvature_factor(const Vector& z, const std::vector<int>& signature, double k) {
  check_signature(signature);
  require_size(z.size(), static_cast<long>(signature.size()), "Zbar dimension");
  const double u = 1.0 + 0.25 * k * eta_product(signature, z, z);
  if (u == 0.0) throw Error(ErrorKind::kSingularity, "U = 0 in the constant-curvature factor");
  return CurvatureFactor{u, -std::log(std::fabs(u))};
}

namespace {

std::vector<Matrix> as_columns(const std::vector<Vector>& vs) { return {vs.begin(), vs.end()}; }

}  // namespace

SigmaProfile sigma_along(const VielbeinField& v, const CurveSample& curve, double curvature_k) {
  curve.validate(v.dim());
  const std::size_t count = curve.size();
  const std::vector<int>& sig = v.flat_signature();

  SigmaProfile out;
  std::vector<Matrix> inv_frames;
  inv_frames.reserve(count);
  for (const Vector& u : curve.u_points) {
    inv_frames.push_back(v.inverse_frame(u));
    out.zbar.push_back(zbar(v, u));
  }
  const std::vector<Matrix> inv_dot = derivative_along(curve.s_values, inv_frames);
  for (const Matrix& m : derivative_along(curve.s_values, as_columns(out.zbar))) out.zbar_dot.push_back(m.col(0));

  for (std::size_t k = 0; k < count; ++k) {
    const Vector& u = curve.u_points[k];
    const Matrix g = v.metric(u);
    const double line = curve.du_ds[k].dot(g * curve.du_ds[k]);
    if (line == 0.0) {
      throw Error(ErrorKind::kSignature, "null tangent (G u'u' = 0) at s=" + s_text(curve.s_values[k]));
    }
    const Vector a = inv_dot[k] * out.zbar[k];
    const Vector b = inv_frames[k] * out.zbar_dot[k];
    const double bracket = 1.0 - (a.dot(g * a) + 2.0 * a.dot(g * b)) / line;
    if (!(bracket > 0.0)) {
      throw Error(ErrorKind::kSignature, "exp(-2 sigma) bracket is not positive at s=" + s_text(curve.s_values[k]));
    }
    ConformalData d;
    d.sigma = -0.5 * std::log(bracket);
    d.curvature_k = curvature_k;
    const CurvatureFactor cf = constant_curvature_factor(out.zbar[k], sig, curvature_k);
    d.u_factor = cf.u_factor;
    d.phi = cf.phi;
    out.samples.push_back(d);
    out.line_element.push_back(line);

    const double flat = std::exp(2.0 * d.sigma) * eta_product(sig, out.zbar_dot[k], out.zbar_dot[k]);
    out.flat_form_error = std::max(out.flat_form_error, std::fabs(line - flat) / std::fabs(line));
  }
  return out;
}

CurvatureFormReport curvature_form_check(const VielbeinField& v, const CurveSample& curve, double k) {
  const SigmaProfile prof = sigma_along(v, curve, k);
  CurvatureFormReport r;
  for (std::size_t i = 0; i < prof.samples.size(); ++i) {
    const ConformalData& d = prof.samples[i];
    const double e2phi = std::exp(2.0 * d.phi);
    const double left = e2phi * eta_product(v.flat_signature(), prof.zbar_dot[i], prof.zbar_dot[i]);
    const double right = std::exp(-2.0 * d.sigma) * prof.line_element[i];
    const double scale = std::max(std::fabs(left), std::fabs(right));
    r.literal_error = std::max(r.literal_error, std::fabs(left - right) / scale);
    r.consistent_error = std::max(r.consistent_error, std::fabs(left - e2phi * right) / scale);
  }
  return r;
}

std::vector<int> big_signature(const std::vector<int>& flat_signature) {
  check_signature(flat_signature);
  std::vector<int> big = flat_signature;
  big.push_back(1);
  big.push_back(-1);
  return big;
}

EmbeddingPoint embed(const VielbeinField& v, const Vector& u, double sigma) {
  if (!std::isfinite(sigma)) throw Error(ErrorKind::kDomain, "sigma must be finite");
  const int n = v.dim();
  const Vector z = zbar(v, u);
  const double a = eta_product(v.flat_signature(), z, z);
  const double scale = std::exp(sigma);
  EmbeddingPoint p;
  p.y.resize(n + 2);
  p.y.head(n) = scale * z;
  p.y(n) = scale * (a - 0.25);
  p.y(n + 1) = scale * (a + 0.25);
  p.big_signature = big_signature(v.flat_signature());
  return p;
}

double null_invariant(const EmbeddingPoint& p) {
  require_size(p.y.size(), static_cast<long>(p.big_signature.size()), "embedding length");
  return eta_product(p.big_signature, p.y, p.y);
}

Vector embed_velocity(const VielbeinField& v, const Vector& u, const Vector& zbar_dot, double sigma,
                      double sigma_dot) {
  const int n = v.dim();
  require_size(zbar_dot.size(), n, "dZbar/ds dimension");
  const Vector z = zbar(v, u);
  const double a = eta_product(v.flat_signature(), z, z);
  const double a_dot = 2.0 * eta_product(v.flat_signature(), z, zbar_dot);
  const double scale = std::exp(sigma);
  Vector y(n + 2), w(n + 2);
  y.head(n) = z;
  y(n) = a - 0.25;
  y(n + 1) = a + 0.25;
  w.head(n) = zbar_dot;
  w(n) = a_dot;
  w(n + 1) = a_dot;
  return scale * (sigma_dot * y + w);
}

LineElementReport line_element_chain(const VielbeinField& v, const CurveSample& curve, double sigma_offset) {
  const SigmaProfile prof = sigma_along(v, curve);
  const std::size_t count = curve.size();
  const std::vector<Matrix> u_dot = derivative_along(curve.s_values, as_columns(curve.u_points));
  std::vector<Vector> ys;
  ys.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    ys.push_back(embed(v, curve.u_points[k], prof.samples[k].sigma + sigma_offset).y);
  }
  const std::vector<Matrix> y_dot = derivative_along(curve.s_values, as_columns(ys));
  const std::vector<int> big = big_signature(v.flat_signature());

  LineElementReport r;
  for (std::size_t k = 1; k + 1 < count; ++k) {
    const Vector du = u_dot[k].col(0);
    const double line = du.dot(v.metric(curve.u_points[k]) * du);
    const double sigma = prof.samples[k].sigma + sigma_offset;
    const double flat = std::exp(2.0 * sigma) * eta_product(v.flat_signature(), prof.zbar_dot[k], prof.zbar_dot[k]);
    const Vector dy = y_dot[k].col(0);
    const double embedded = eta_product(big, dy, dy);
    r.max_rel_err_flatform = std::max(r.max_rel_err_flatform, std::fabs(flat - line) / std::fabs(line));
    r.max_rel_err_embedding = std::max(r.max_rel_err_embedding, std::fabs(embedded - line) / std::fabs(line));
  }
  return r;
}

MomentumSets consistent_momenta(const VielbeinField& v, const Vector& u, const Vector& du_ds,
                                const Vector& zbar_dot, const Vector& y_dot) {
  const int n = v.dim();
  require_size(du_ds.size(), n, "tangent dimension");
  require_size(zbar_dot.size(), n, "dZbar/ds dimension");
  require_size(y_dot.size(), n + 2, "dy/ds dimension");
  MomentumSets m;
  m.p = v.metric(u) * du_ds;
  m.p_flat = v.eta() * zbar_dot;
  const std::vector<int> big = big_signature(v.flat_signature());
  m.p_embed = y_dot;
  for (int i = 0; i < n + 2; ++i) m.p_embed(i) *= big[static_cast<std::size_t>(i)];
  return m;
}

ThreeHamiltonians three_hamiltonians(const Matrix& metric, double sigma, const std::vector<int>& big_sig,
                                     const MomentumSets& momenta) {
  const long n = metric.rows();
  require_size(metric.cols(), n, "metric must be square");
  require_size(static_cast<long>(big_sig.size()), n + 2, "embedding signature length");
  require_size(momenta.p.size(), n, "p length");
  require_size(momenta.p_flat.size(), n, "flat momenta length");
  require_size(momenta.p_embed.size(), n + 2, "embedding momenta length");
  const std::vector<int> flat(big_sig.begin(), big_sig.begin() + n);
  ThreeHamiltonians out;
  const Matrix g_inv = checked_inverse(metric, "metric");
  out.q = 0.5 * momenta.p.dot(g_inv * momenta.p);
  out.hhat = 0.5 * std::exp(2.0 * sigma) * eta_product(flat, momenta.p_flat, momenta.p_flat);
  out.h = 0.5 * eta_product(big_sig, momenta.p_embed, momenta.p_embed);
  return out;
}

}  // namespace linemap
