#include "linemap/calabi.hpp"

#include <cmath>

#include "linemap/error.hpp"

namespace linemap {

Tensor::Tensor(int n, int rank) : n_(n), rank_(rank) {
  if (n < 1 || (rank != 3 && rank != 4)) throw Error(ErrorKind::kSize, "tensor needs n >= 1 and rank 3 or 4");
  std::size_t size = 1;
  for (int r = 0; r < rank; ++r) size *= static_cast<std::size_t>(n);
  data_.assign(size, 0.0);
}

std::size_t Tensor::index3(int i, int j, int k) const {
  const std::size_t n = static_cast<std::size_t>(n_);
  return (static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n + static_cast<std::size_t>(k);
}

std::size_t Tensor::index4(int i, int j, int k, int l) const {
  const std::size_t n = static_cast<std::size_t>(n_);
  return index3(i, j, k) * n + static_cast<std::size_t>(l);
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) {
    if (std::isnan(v)) return v;
    m = std::max(m, std::fabs(v));
  }
  return m;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require_size(b.n(), a.n(), "tensor dimension");
  require_size(b.rank(), a.rank(), "tensor rank");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = std::fabs(a.data()[i] - b.data()[i]);
    if (std::isnan(d)) return d;
    m = std::max(m, d);
  }
  return m;
}

ScalarPotential::ScalarPotential(std::string name, int dim, Fn eval)
    : name_(std::move(name)), dim_(dim), eval_(std::move(eval)) {
  if (dim < 1) throw Error(ErrorKind::kSize, "potential needs dim >= 1");
}

ScalarPotential ScalarPotential::quadratic(int dim) {
  return ScalarPotential("quadratic", dim, [](const Vector& x) { return 0.5 * x.squaredNorm(); });
}

ScalarPotential ScalarPotential::quadratic_form(const Matrix& q) {
  require_size(q.rows(), q.cols(), "quadratic form must be square");
  return ScalarPotential("quadratic-form", static_cast<int>(q.rows()),
                         [q](const Vector& x) { return 0.5 * x.dot(q * x); });
}

ScalarPotential ScalarPotential::quartic(int dim, double c) {
  return ScalarPotential("quartic", dim, [c](const Vector& x) {
    return 0.5 * x.squaredNorm() + c * x.array().square().square().sum();
  });
}

ScalarPotential ScalarPotential::coupled_quartic(int dim, double eps) {
  return ScalarPotential("coupled-quartic", dim, [eps](const Vector& x) {
    double coupling = 0.0;
    for (long i = 0; i < x.size(); ++i) {
      for (long j = i + 1; j < x.size(); ++j) coupling += x(i) * x(i) * x(j) * x(j);
    }
    return 0.5 * x.squaredNorm() + eps * coupling;
  });
}

ScalarPotential ScalarPotential::pure_quartic(int dim) {
  return ScalarPotential("pure-quartic", dim, [](const Vector& x) { return x.array().square().square().sum(); });
}

double ScalarPotential::operator()(const Vector& x) const {
  require_size(x.size(), dim_, "potential argument");
  const double v = eval_(x);
  if (!std::isfinite(v)) throw Error(ErrorKind::kDomain, "potential '" + name_ + "' is not finite");
  return v;
}

double step_scale(const Vector& x) { return std::max(1.0, x.cwiseAbs().maxCoeff()); }

double product_stencil(const ScalarPotential::Fn& f, const Vector& x, const std::vector<int>& axes, double h) {
  const std::size_t k = axes.size();
  if (k == 0 || k > 4) throw Error(ErrorKind::kUsage, "product stencil supports orders 1 to 4");
  double acc = 0.0;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    Vector p = x;
    int sign = 1;
    for (std::size_t a = 0; a < k; ++a) {
      const bool minus = (mask >> a) & 1u;
      p(axes[a]) += minus ? -h : h;
      if (minus) sign = -sign;
    }
    acc += sign * f(p);
  }
  return acc / std::pow(2.0 * h, static_cast<double>(k));
}

MetricField::MetricField(int dim, Fn eval, JetFn jet) : dim_(dim), eval_(std::move(eval)), jet_(std::move(jet)) {
  if (dim < 1) throw Error(ErrorKind::kSize, "metric needs dim >= 1");
}

Matrix MetricField::operator()(const Vector& x) const {
  require_size(x.size(), dim_, "metric argument");
  Matrix g = eval_(x);
  require_size(g.rows(), dim_, "metric rows");
  require_size(g.cols(), dim_, "metric cols");
  if (!g.allFinite()) throw Error(ErrorKind::kDomain, "metric is not finite");
  return 0.5 * (g + g.transpose());
}

MetricJet MetricField::jet(const Vector& x) const {
  if (jet_) return jet_(x);
  const int n = dim_;
  const double scale = step_scale(x);
  const double h1 = kFirstStep * scale;
  const double h2 = kSecondStep * scale;
  MetricJet out;
  out.g = (*this)(x);
  for (int k = 0; k < n; ++k) {
    Vector xp = x, xm = x;
    xp(k) += h1;
    xm(k) -= h1;
    out.dg.push_back(((*this)(xp) - (*this)(xm)) / (2.0 * h1));
  }
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      Matrix acc = Matrix::Zero(n, n);
      for (int sk : {1, -1}) {
        for (int sl : {1, -1}) {
          Vector p = x;
          p(k) += sk * h2;
          p(l) += sl * h2;
          acc += (sk * sl) * (*this)(p);
        }
      }
      out.ddg.push_back(acc / (4.0 * h2 * h2));
    }
  }
  return out;
}

MetricField hessian_metric(const ScalarPotential& u, int power) {
  if (power < 1) throw Error(ErrorKind::kUsage, "power must be a positive integer");
  const int n = u.dim();
  const ScalarPotential::Fn w = [u, power](const Vector& x) { return std::pow(u(x), power); };
  auto hessian = [w, n](const Vector& x) {
    const double h2 = kSecondStep * step_scale(x);
    Matrix g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) g(i, j) = g(j, i) = product_stencil(w, x, {i, j}, h2);
    }
    return g;
  };
  auto jet = [w, n, hessian](const Vector& x) {
    const double scale = step_scale(x);
    const double h3 = kThirdStep * scale;
    const double h4 = kFourthStep * scale;
    MetricJet out;
    out.g = hessian(x);
    for (int k = 0; k < n; ++k) {
      Matrix d(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) d(i, j) = d(j, i) = product_stencil(w, x, {i, j, k}, h3);
      }
      out.dg.push_back(d);
    }
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        Matrix d(n, n);
        for (int i = 0; i < n; ++i) {
          for (int j = i; j < n; ++j) d(i, j) = d(j, i) = product_stencil(w, x, {i, j, k, l}, h4);
        }
        out.ddg.push_back(d);
      }
    }
    return out;
  };
  return MetricField(n, hessian, jet);
}

Tensor christoffel_first(const MetricJet& jet) {
  const int n = static_cast<int>(jet.g.rows());
  Tensor gamma(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int m = 0; m < n; ++m) {
        gamma(i, j, m) = 0.5 * (jet.dg[i](j, m) + jet.dg[j](i, m) - jet.dg[m](i, j));
      }
    }
  }
  return gamma;
}

Tensor christoffel_first(const MetricField& g, const Vector& x) { return christoffel_first(g.jet(x)); }

namespace {

Matrix metric_inverse(const Matrix& g) { return checked_inverse(g, "metric"); }

Tensor raise_first(const Matrix& g_inv, const Tensor& lower) {
  const int n = lower.n();
  Tensor out(n, 3);
  for (int a = 0; a < n; ++a) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m) acc += g_inv(a, m) * lower(i, j, m);
        out(a, i, j) = acc;
      }
    }
  }
  return out;
}

}  // namespace

Tensor christoffel_second(const MetricJet& jet) {
  return raise_first(metric_inverse(jet.g), christoffel_first(jet));
}

Tensor riemann(const MetricJet& jet) {
  const int n = static_cast<int>(jet.g.rows());
  const Matrix g_inv = metric_inverse(jet.g);
  const Tensor first = christoffel_first(jet);
  const Tensor gamma = raise_first(g_inv, first);

  // dgamma[k](a, i, j) = d_k Gamma^a_ij
  //   = -G^-1 (d_k G) G^-1 Gamma_first + G^-1 d_k Gamma_first
  std::vector<Tensor> dgamma;
  for (int k = 0; k < n; ++k) {
    Tensor dfirst(n, 3);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m) {
          const std::size_t ki = static_cast<std::size_t>(k * n + i);
          const std::size_t kj = static_cast<std::size_t>(k * n + j);
          const std::size_t km = static_cast<std::size_t>(k * n + m);
          dfirst(i, j, m) = 0.5 * (jet.ddg[ki](j, m) + jet.ddg[kj](i, m) - jet.ddg[km](i, j));
        }
      }
    }
    const Matrix d_inv = -g_inv * jet.dg[static_cast<std::size_t>(k)] * g_inv;
    const Tensor a = raise_first(d_inv, first);
    const Tensor b = raise_first(g_inv, dfirst);
    Tensor sum(n, 3);
    for (int a_ = 0; a_ < n; ++a_) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) sum(a_, i, j) = a(a_, i, j) + b(a_, i, j);
      }
    }
    dgamma.push_back(sum);
  }

  Tensor r(n, 4);
  for (int a = 0; a < n; ++a) {
    for (int m = 0; m < n; ++m) {
      for (int s = 0; s < n; ++s) {
        for (int v = 0; v < n; ++v) {
          double acc = dgamma[static_cast<std::size_t>(v)](a, m, s) - dgamma[static_cast<std::size_t>(s)](a, m, v);
          for (int e = 0; e < n; ++e) acc += gamma(e, m, s) * gamma(a, e, v) - gamma(e, m, v) * gamma(a, s, e);
          r(a, m, s, v) = acc;
        }
      }
    }
  }
  return r;
}

Tensor riemann(const MetricField& g, const Vector& x) { return riemann(g.jet(x)); }

Tensor lowered_riemann(const MetricJet& jet) {
  const int n = static_cast<int>(jet.g.rows());
  const Tensor r = riemann(jet);
  Tensor out(n, 4);
  for (int h = 0; h < n; ++h) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          double acc = 0.0;
          for (int a = 0; a < n; ++a) acc += jet.g(h, a) * r(a, i, j, k);
          out(h, i, j, k) = acc;
        }
      }
    }
  }
  return out;
}

Matrix ricci(const MetricJet& jet) {
  const int n = static_cast<int>(jet.g.rows());
  const Tensor r = riemann(jet);
  Matrix out = Matrix::Zero(n, n);
  for (int m = 0; m < n; ++m) {
    for (int v = 0; v < n; ++v) {
      for (int a = 0; a < n; ++a) out(m, v) += r(a, m, a, v);
    }
  }
  return out;
}

Matrix ricci(const MetricField& g, const Vector& x) { return ricci(g.jet(x)); }

double gaussian_curvature(const MetricField& g, const Vector& x) {
  if (g.dim() != 2) throw Error(ErrorKind::kUsage, "Gaussian curvature needs a two-dimensional metric");
  const MetricJet jet = g.jet(x);
  const Tensor r = lowered_riemann(jet);
  return -r(0, 1, 0, 1) / jet.g.determinant();
}

HessianCurvatureReport hessian_curvature_check(const ScalarPotential& u, const Vector& x, int power,
                                               bool flip_second_product, double tolerance) {
  const MetricField metric = hessian_metric(u, power);
  const MetricJet jet = metric.jet(x);
  const int n = u.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jet.g, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (!(min_eig > 0.0)) {
    throw Error(ErrorKind::kConditioning, "Hessian metric is not positive definite at the sample point");
  }
  const Matrix g_inv = metric_inverse(jet.g);
  const Tensor gamma = christoffel_first(jet);
  const double second_sign = flip_second_product ? -1.0 : 1.0;

  HessianCurvatureReport report{lowered_riemann(jet), Tensor(n, 4)};
  for (int h = 0; h < n; ++h) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          double acc = 0.0;
          for (int l = 0; l < n; ++l) {
            for (int m = 0; m < n; ++m) {
              acc += g_inv(l, m) * (gamma(i, j, m) * gamma(h, k, l) - second_sign * gamma(i, k, m) * gamma(h, j, l));
            }
          }
          report.from_identity(h, i, j, k) = -acc;
        }
      }
    }
  }
  report.max_difference = max_abs_diff(report.from_riemann, report.from_identity);
  report.tolerance = tolerance;
  report.pass = report.max_difference <= tolerance;
  report.min_eigenvalue = min_eig;
  return report;
}

LagrangianHamiltonian calabi_lagrangian_hamiltonian(const Matrix& g, const Vector& velocity) {
  require_size(g.rows(), g.cols(), "metric must be square");
  require_size(velocity.size(), g.rows(), "velocity length");
  const Matrix g_inv = metric_inverse(g);
  const Vector p = g * velocity;
  LagrangianHamiltonian out;
  out.l = velocity.dot(p);
  out.h = p.dot(g_inv * p);
  out.difference = out.l - out.h;
  return out;
}

}  // namespace linemap
