#include "linemap/phase_space.hpp"

#include <cmath>
#include <sstream>

#include "linemap/error.hpp"

namespace linemap {

PhaseVector::PhaseVector(Vector components) : components_(std::move(components)) {
  if (components_.size() < 2 || components_.size() % 2 != 0) {
    throw Error(ErrorKind::kSize,
                "phase vector needs an even length >= 2, got " + std::to_string(components_.size()));
  }
}

StructureMatrix StructureMatrix::symplectic(int n) {
  if (n < 1) throw Error(ErrorKind::kSize, "symplectic structure needs n >= 1");
  return StructureMatrix(StructureKind::kSymplectic, symplectic_matrix(n));
}

StructureMatrix StructureMatrix::general(Matrix value) {
  if (value.rows() != value.cols() || value.rows() < 2 || value.rows() % 2 != 0) {
    throw Error(ErrorKind::kSize, "structure matrix must be 2n x 2n");
  }
  return StructureMatrix(StructureKind::kGeneral, std::move(value));
}

Reparameterization::Reparameterization(std::string name, ScalarFunction t_of_tau, ScalarFunction dt_dtau)
    : name_(std::move(name)), t_of_tau_(std::move(t_of_tau)), dt_dtau_(std::move(dt_dtau)) {}

Reparameterization Reparameterization::identity() {
  return Reparameterization("identity", [](double tau) { return tau; }, [](double) { return 1.0; });
}

Reparameterization Reparameterization::linear(double scale) {
  return Reparameterization(
      "linear", [scale](double tau) { return scale * tau; }, [scale](double) { return scale; });
}

Reparameterization Reparameterization::exponential(double rate) {
  if (rate == 0.0) return identity();
  return Reparameterization(
      "exponential", [rate](double tau) { return std::expm1(rate * tau) / rate; },
      [rate](double tau) { return std::exp(rate * tau); });
}

Reparameterization Reparameterization::polynomial(std::vector<double> coeffs) {
  auto t = [coeffs](double tau) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * tau + *it;
    return acc;
  };
  auto dt = [coeffs](double tau) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * tau + static_cast<double>(k) * coeffs[k];
    return acc;
  };
  return Reparameterization("polynomial", t, dt);
}

double reparameterization_consistency(const Reparameterization& rep, const std::vector<double>& grid,
                                      double step) {
  double worst = 0.0;
  for (double tau : grid) {
    const double fd = (rep.t_of_tau(tau + step) - rep.t_of_tau(tau - step)) / (2.0 * step);
    const double exact = rep.dt_dtau(tau);
    worst = std::max(worst, std::fabs(fd - exact) / std::max(1.0, std::fabs(exact)));
  }
  return worst;
}

QuadraticHamiltonian::QuadraticHamiltonian(int n, MatrixOfTau hmat, VectorOfTau gvec, ScalarOfTau dscal)
    : n_(n), hmat_(std::move(hmat)), gvec_(std::move(gvec)), dscal_(std::move(dscal)) {
  if (n < 1) throw Error(ErrorKind::kSize, "Hamiltonian needs n >= 1");
}

QuadraticHamiltonian QuadraticHamiltonian::constant(const Matrix& h, const Vector& g, double d) {
  require_size(h.rows(), h.cols(), "Hamiltonian matrix must be square");
  if (h.rows() % 2 != 0) throw Error(ErrorKind::kSize, "Hamiltonian matrix must be 2n x 2n");
  const int n = static_cast<int>(h.rows() / 2);
  VectorOfTau gv;
  if (g.size() != 0) {
    require_size(g.size(), h.rows(), "linear term length");
    gv = [g](double) { return g; };
  }
  ScalarOfTau dv;
  if (d != 0.0) dv = [d](double) { return d; };
  return QuadraticHamiltonian(n, [h](double) { return h; }, gv, dv);
}

QuadraticHamiltonian QuadraticHamiltonian::from_polynomials(const MatrixPolynomial& h,
                                                            std::optional<MatrixPolynomial> g,
                                                            std::vector<double> d) {
  if (h.rows() != h.cols() || h.rows() % 2 != 0) {
    throw Error(ErrorKind::kSize, "Hamiltonian polynomial must be 2n x 2n");
  }
  VectorOfTau gv;
  if (g) {
    require_size(g->rows(), h.rows(), "linear term length");
    require_size(g->cols(), 1, "linear term must be a column");
    gv = [gp = *g](double tau) -> Vector { return gp(tau).col(0); };
  }
  ScalarOfTau dv;
  if (!d.empty()) {
    dv = [d](double tau) {
      double acc = 0.0;
      for (auto it = d.rbegin(); it != d.rend(); ++it) acc = acc * tau + *it;
      return acc;
    };
  }
  return QuadraticHamiltonian(h.rows() / 2, h.as_function(), gv, dv);
}

QuadraticHamiltonian QuadraticHamiltonian::state_dependent(int n, StateMatrix hmat, StateDerivative dhmat,
                                                           VectorOfTau gvec, ScalarOfTau dscal) {
  QuadraticHamiltonian h(n, {}, std::move(gvec), std::move(dscal));
  h.state_hmat_ = std::move(hmat);
  h.state_dhmat_ = std::move(dhmat);
  return h;
}

Matrix QuadraticHamiltonian::hmat(double tau, const Vector& xi) const {
  Matrix h = state_hmat_ ? state_hmat_(tau, xi) : hmat_(tau);
  require_size(h.rows(), 2 * n_, "Hamiltonian matrix rows");
  require_size(h.cols(), 2 * n_, "Hamiltonian matrix cols");
  const double scale = max_abs(h);
  if (max_abs_diff(h, h.transpose()) > 1e-12 * scale) {
    std::ostringstream os;
    os << "Hamiltonian matrix is not symmetric at tau=" << tau;
    throw Error(ErrorKind::kUsage, os.str());
  }
  return h;
}

Vector QuadraticHamiltonian::gvec(double tau) const {
  if (!gvec_) return Vector::Zero(2 * n_);
  Vector g = gvec_(tau);
  require_size(g.size(), 2 * n_, "linear term length");
  return g;
}

double QuadraticHamiltonian::dscal(double tau) const { return dscal_ ? dscal_(tau) : 0.0; }

std::vector<Matrix> QuadraticHamiltonian::hmat_derivative(double tau, const Vector& xi) const {
  if (!state_dhmat_) return {};
  std::vector<Matrix> d = state_dhmat_(tau, xi);
  require_size(static_cast<long>(d.size()), 2 * n_, "state derivative count");
  for (const Matrix& m : d) {
    require_size(m.rows(), 2 * n_, "state derivative rows");
    require_size(m.cols(), 2 * n_, "state derivative cols");
  }
  return d;
}

namespace {
void check_dims(const QuadraticHamiltonian& h, const PhaseVector& xi) {
  require_size(xi.n(), h.n(), "phase vector n vs Hamiltonian n");
}
}  // namespace

double evaluate(const QuadraticHamiltonian& h, const PhaseVector& xi, double tau) {
  check_dims(h, xi);
  const Vector& x = xi.components();
  const Matrix hm = h.hmat(tau, x);
  return 0.5 * x.dot(hm * x) + h.gvec(tau).dot(x) + h.dscal(tau);
}

Vector gradient(const QuadraticHamiltonian& h, const PhaseVector& xi, double tau) {
  check_dims(h, xi);
  const Vector& x = xi.components();
  Vector grad = h.hmat(tau, x) * x + h.gvec(tau);
  const std::vector<Matrix> dh = h.hmat_derivative(tau, x);
  for (std::size_t l = 0; l < dh.size(); ++l) grad(static_cast<long>(l)) += 0.5 * x.dot(dh[l] * x);
  return grad;
}

Vector flow_rhs(const StructureMatrix& c, const QuadraticHamiltonian& h, const PhaseVector& xi, double tau) {
  require_size(c.n(), h.n(), "structure matrix n vs Hamiltonian n");
  return c.value() * gradient(h, xi, tau);
}

CoefficientSet coefficient_set(const QuadraticHamiltonian& h, const PhaseVector& xi, double tau,
                               const Reparameterization& rep, Side side) {
  check_dims(h, xi);
  if (h.is_state_dependent() && !h.has_state_derivative()) {
    throw Error(ErrorKind::kCapability,
                "state-dependent Hamiltonian matrix supplied without its xi-derivative");
  }
  // Target coefficients are functions of t; source coefficients of tau.
  const double arg = side == Side::kTarget ? rep.t_of_tau(tau) : tau;
  const Vector& x = xi.components();
  const int dim = 2 * h.n();

  // 2 Xbar_lj = (dH_ij / dxi^l) xi^i + 2 H_lj + 2 dG_j/dxi^l, with G independent of xi.
  Matrix x_bar = h.hmat(arg, x);
  const std::vector<Matrix> dh = h.hmat_derivative(arg, x);
  for (std::size_t l = 0; l < dh.size(); ++l) {
    x_bar.row(static_cast<long>(l)) += 0.5 * (x.transpose() * dh[l]);
  }

  CoefficientSet out;
  out.zmat = x_bar;
  if (side == Side::kTarget) {
    out.ybar = rep.dt_dtau(tau) * x_bar;
    out.ebar = h.gvec(arg);
    out.gbar = Vector::Zero(dim);
  } else {
    out.ybar = Matrix::Zero(dim, dim);
    out.ebar = Vector::Zero(dim);
    out.gbar = h.gvec(arg);
  }
  return out;
}

CoefficientSet combine(const CoefficientSet& source, const CoefficientSet& target) {
  require_size(source.zmat.rows(), target.ybar.rows(), "combined coefficient dimension");
  return CoefficientSet{source.zmat, target.ybar, target.ebar, source.gbar};
}

}  // namespace linemap
