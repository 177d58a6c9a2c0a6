#pragma once

// Quadratic and generalized-quadratic Hamiltonians on a 2n-dimensional phase
// space xi = (q^1..q^n, p^1..p^n), the structure matrices that turn their
// gradients into flows, and the coefficient matrices (Z-bar, Y-bar, E-bar,
// G-bar) that drive the transport equations.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "linemap/linalg.hpp"
#include "linemap/polynomial.hpp"

namespace linemap {

class PhaseVector {
 public:
  // Size error unless the length is even and at least 2.
  explicit PhaseVector(Vector components);

  int n() const { return static_cast<int>(components_.size() / 2); }
  const Vector& components() const { return components_; }
  Vector coordinates() const { return components_.head(n()); }
  Vector momenta() const { return components_.tail(n()); }

 private:
  Vector components_;
};

enum class StructureKind { kSymplectic, kGeneral };

// J of canonical mechanics, or one of the general B, C, K matrices.
class StructureMatrix {
 public:
  static StructureMatrix symplectic(int n);
  static StructureMatrix general(Matrix value);

  StructureKind kind() const { return kind_; }
  const Matrix& value() const { return value_; }
  int n() const { return static_cast<int>(value_.rows() / 2); }

 private:
  StructureMatrix(StructureKind kind, Matrix value) : kind_(kind), value_(std::move(value)) {}
  StructureKind kind_;
  Matrix value_;
};

// Relation between the source parameter tau and the target parameter t.
class Reparameterization {
 public:
  using ScalarFunction = std::function<double(double)>;

  Reparameterization(std::string name, ScalarFunction t_of_tau, ScalarFunction dt_dtau);

  // t = tau
  static Reparameterization identity();
  // t = scale * tau
  static Reparameterization linear(double scale);
  // t = (exp(rate * tau) - 1) / rate, so t(0) = 0 and dt/dtau(0) = 1
  static Reparameterization exponential(double rate);
  // t = sum_k coeffs[k] tau^k
  static Reparameterization polynomial(std::vector<double> coeffs);

  const std::string& name() const { return name_; }
  double t_of_tau(double tau) const { return t_of_tau_(tau); }
  double dt_dtau(double tau) const { return dt_dtau_(tau); }

 private:
  std::string name_;
  ScalarFunction t_of_tau_;
  ScalarFunction dt_dtau_;
};

// Largest relative gap between dt_dtau and a central difference of t_of_tau
// over `grid`, relative to max(1, |dt_dtau|).
double reparameterization_consistency(const Reparameterization& rep, const std::vector<double>& grid,
                                      double step = 1e-5);

// H(tau, xi) = 1/2 xi^T H(tau) xi + G(tau) . xi + D(tau).
//
// H may depend on the state. A state-dependent H carries an optional callback
// for its partial derivatives dH/dxi^l; without it the Hamiltonian is flagged
// constant-coefficient for the purposes of gradient(), and coefficient_set()
// refuses it.
class QuadraticHamiltonian {
 public:
  using MatrixOfTau = std::function<Matrix(double)>;
  using VectorOfTau = std::function<Vector(double)>;
  using ScalarOfTau = std::function<double(double)>;
  using StateMatrix = std::function<Matrix(double, const Vector&)>;
  // Element l is dH/dxi^l.
  using StateDerivative = std::function<std::vector<Matrix>(double, const Vector&)>;

  QuadraticHamiltonian(int n, MatrixOfTau hmat, VectorOfTau gvec = {}, ScalarOfTau dscal = {});

  static QuadraticHamiltonian constant(const Matrix& h, const Vector& g = Vector(), double d = 0.0);
  static QuadraticHamiltonian from_polynomials(const MatrixPolynomial& h,
                                               std::optional<MatrixPolynomial> g = std::nullopt,
                                               std::vector<double> d = {});
  static QuadraticHamiltonian state_dependent(int n, StateMatrix hmat, StateDerivative dhmat = {},
                                              VectorOfTau gvec = {}, ScalarOfTau dscal = {});

  int n() const { return n_; }
  bool is_state_dependent() const { return state_hmat_ != nullptr; }
  bool has_state_derivative() const { return static_cast<bool>(state_dhmat_); }
  // True when derivative terms dH/dxi are taken as zero.
  bool constant_coefficient() const { return !has_state_derivative(); }

  // Usage error if the value is not symmetric to 1e-12 relative.
  Matrix hmat(double tau, const Vector& xi) const;
  Vector gvec(double tau) const;
  double dscal(double tau) const;
  // Empty unless has_state_derivative().
  std::vector<Matrix> hmat_derivative(double tau, const Vector& xi) const;

 private:
  int n_;
  MatrixOfTau hmat_;
  StateMatrix state_hmat_;
  StateDerivative state_dhmat_;
  VectorOfTau gvec_;
  ScalarOfTau dscal_;
};

// 1/2 xi^T H xi + G . xi + D
double evaluate(const QuadraticHamiltonian& h, const PhaseVector& xi, double tau);

// dH/dxi. For constant-coefficient H this is H xi + G; with a state derivative
// callback the extra 1/2 xi^T (dH/dxi^l) xi term is included.
Vector gradient(const QuadraticHamiltonian& h, const PhaseVector& xi, double tau);

// d xi / d tau = C dH/dxi
Vector flow_rhs(const StructureMatrix& c, const QuadraticHamiltonian& h, const PhaseVector& xi, double tau);

enum class Side { kSource, kTarget };

// zmat: Z-bar of the source, or the unscaled Y-bar of the target.
// ybar: (dt/dtau) * Y-bar on the target side, zero on the source side.
// ebar: E + dF/deta on the target side (F is scalar in t, so ebar = E).
// gbar: G + dD/dxi on the source side (D is scalar in tau, so gbar = G).
struct CoefficientSet {
  Matrix zmat;
  Matrix ybar;
  Vector ebar;
  Vector gbar;
};

CoefficientSet coefficient_set(const QuadraticHamiltonian& h, const PhaseVector& xi, double tau,
                               const Reparameterization& rep, Side side);

// Z-bar and G-bar from `source`, Y-bar and E-bar from `target`.
CoefficientSet combine(const CoefficientSet& source, const CoefficientSet& target);

}  // namespace linemap
