#pragma once

// Exact mapping between two Hamiltonians H = 1/2 eta^{AB} P_A P_B on flat
// (n+2)-dimensional embedding spaces: closed-form transport blocks, the
// phase-space map, and the W / M matrices that carry flat coordinates and
// momenta over to local coordinates of the target manifold.

#include <functional>
#include <string>
#include <vector>

#include "linemap/linalg.hpp"
#include "linemap/phase_space.hpp"
#include "linemap/transport.hpp"

namespace linemap {

// Diagonal flat metric given by a list of +1 / -1.
class FlatHamiltonian {
 public:
  explicit FlatHamiltonian(std::vector<int> signature);

  int m() const { return static_cast<int>(signature_.size()); }
  const std::vector<int>& signature() const { return signature_; }
  Matrix diag() const;

  // 1/2 eta^{AB} P_A P_B
  double value(const Vector& momenta) const;

 private:
  std::vector<int> signature_;
};

// Usage error unless `m` is diagonal with entries exactly +1 or -1.
void require_signature_matrix(const Matrix& m, const char* what);

Matrix signature_matrix(const std::vector<int>& signature);

// T3 constant; T1 = Y4 T3 t; T2 = -Y4 T3 Z4 t tau; T4 = -T3 Z4 tau.
struct ClosedFormT {
  Matrix t3;
  Matrix y4;  // target signature
  Matrix z4;  // source signature
  Reparameterization rep = Reparameterization::identity();

  int m() const { return static_cast<int>(t3.rows()); }
  void validate() const;
};

BlockMatrix closed_form_T(const ClosedFormT& cf, double tau);

// Analytic dT/dtau of the closed form.
BlockMatrix closed_form_T_derivative(const ClosedFormT& cf, double tau);

// Z = [[0, 0], [0, Z4]] and Ybar = (dt/dtau) [[0, 0], [0, Y4]].
BlockMatrix flat_z(const Matrix& z4);
BlockMatrix flat_ybar(const Matrix& y4, double dt_dtau);

// |dT/dtau (analytic) - (J Ybar T - T J Z)| at tau, entrywise max.
double closed_form_residual(const ClosedFormT& cf, double tau);

// (Ybar, Pbar) = (T1 Y + T2 P, T3 Y + T4 P)
PhaseVector map_phase(const BlockMatrix& t, const PhaseVector& state);

struct CoordinateMatrices {
  Matrix w1;  // n x m
  Matrix w2;  // n x m
};

// w1 = exp(-sigma_bar) Ebar^{-1} [T1 rows 1..n], w2 likewise with T2.
// `ebar_frame` is the n x n frame E^(A)_Lambda at the target point.
CoordinateMatrices build_w12(double sigma_bar, const Matrix& ebar_frame, const Matrix& t1, const Matrix& t2);

// Target-side data as functions of the target parameter t.
struct TargetFrame {
  std::function<double(double)> sigma_bar;
  std::function<Matrix(double)> ebar_frame;
};

enum class MConvention {
  kLiteral,               // M1 built from T2, as printed
  kDerivationConsistent,  // M1 built from T1, as the product rule requires
};

std::string to_string(MConvention convention);

struct MappingMatrices {
  Matrix w1, w2;              // coordinates
  Matrix m1, m2, m3, m4;      // momentum pieces, index raised
  Matrix w3_upper, w4_upper;  // M1 + M3, M2 + M4
  Matrix w3, w4;              // lowered with the target metric
};

// Full set at target parameter t. d/dt of exp(-sigma_bar) Ebar^{-1} is a
// central difference with step 1e-5 * max(1, |t|).
MappingMatrices build_mapping(double t, const TargetFrame& frame, const Matrix& y4, const BlockMatrix& tmat,
                              const Matrix& gbar_target, MConvention convention);

struct MappedState {
  Vector u_bar;
  Vector p_bar;
};

// u_bar = W1 Y + W2 P, p_bar = W3 Y + W4 P (lowered)
MappedState map_coordinates(const MappingMatrices& w, const Vector& y, const Vector& p);

struct EqualityReport {
  double q = 0.0;
  double hhat = 0.0;
  double h = 0.0;
  double max_pairwise_diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Passes iff every pairwise |difference| <= 1e-10 * max(1, |h|).
EqualityReport hamiltonian_equality_check(double q_val, double hhat_val, double h_val);

// Hamilton-equation check of the momentum map: p_bar from the W3/W4 matrices
// against Gbar d(u_bar)/dt obtained by differencing the coordinate map along
// the source flow (Y' = Z4 P, P' = 0) and the closed-form T.
struct HamiltonOracleScenario {
  ClosedFormT transport;
  TargetFrame frame;
  std::vector<int> target_flat_signature;  // the n entries used for the target metric
  Vector y0;                               // source flat coordinates at tau = 0
  Vector p0;                               // source flat momenta
  std::vector<double> taus;                // sample points (tau > 0 and away from the ends)
  double difference_step = 1e-4;
};

struct HamiltonOracleResult {
  double literal_error = 0.0;
  double consistent_error = 0.0;
  double tolerance = 1e-6;
  bool literal_pass = false;
  bool consistent_pass = false;
  // "derivation-consistent", "literal", "both" or "neither"
  std::string satisfied_by;
};

// Target metric used by the oracle: exp(2 sigma_bar) E^T eta E.
Matrix conformal_target_metric(const TargetFrame& frame, const std::vector<int>& flat_signature, double t);

HamiltonOracleResult hamilton_equation_oracle(const HamiltonOracleScenario& scenario, double tolerance = 1e-6);

}  // namespace linemap
