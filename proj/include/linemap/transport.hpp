#pragma once

// Transport of the mapping matrix T (eta = T xi + r) between two phase
// spaces, the auxiliary S and R systems, the T = S A R composition, a
// fixed-step RK4 integrator and residual measurement.

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "linemap/linalg.hpp"
#include "linemap/phase_space.hpp"

namespace linemap {

// A 2n x 2n matrix viewed as [[b1, b2], [b3, b4]] with n x n blocks.
class BlockMatrix {
 public:
  explicit BlockMatrix(Matrix dense);

  static BlockMatrix assemble(const Matrix& b1, const Matrix& b2, const Matrix& b3, const Matrix& b4);
  static BlockMatrix zero(int n) { return BlockMatrix(Matrix::Zero(2 * n, 2 * n)); }
  static BlockMatrix identity(int n) { return BlockMatrix(Matrix::Identity(2 * n, 2 * n)); }

  int n() const { return static_cast<int>(dense_.rows() / 2); }
  const Matrix& dense() const { return dense_; }

  // index in 1..4, numbered row-major
  Matrix block(int index) const;
  Matrix b1() const { return block(1); }
  Matrix b2() const { return block(2); }
  Matrix b3() const { return block(3); }
  Matrix b4() const { return block(4); }

 private:
  Matrix dense_;
};

using BlockFunction = std::function<BlockMatrix(double)>;

struct TransportState {
  BlockMatrix tmat;
  Vector rvec;
  double tau;
  bool affine;

  static TransportState linear(BlockMatrix t, double tau);
  static TransportState affine_map(BlockMatrix t, Vector r, double tau);
};

// D, E, F, G of the two Riccati systems for S and R.
struct RiccatiSystemMatrices {
  BlockFunction dmat;
  BlockFunction emat;
  BlockFunction fmat;
  BlockFunction gmat;
};

// dT/dtau = B Ybar T - T C Z
BlockMatrix t_rhs(const BlockMatrix& t, const StructureMatrix& c, const BlockMatrix& z,
                  const StructureMatrix& b, const BlockMatrix& ybar);

// dr/dtau = K (Ybar r + (dt/dtau) Ebar) - T C Gbar.
// coeff.ybar already carries the dt/dtau factor (see coefficient_set).
Vector r_rhs(const BlockMatrix& t, const Vector& r, const StructureMatrix& c, const StructureMatrix& k,
             const CoefficientSet& coeff, const Reparameterization& rep, double tau);

struct SExtra {
  BlockMatrix dmat;
  BlockMatrix amat;
  BlockMatrix fmat;
};

struct RExtra {
  BlockMatrix emat;
  BlockMatrix gmat;
  BlockMatrix amat;
};

// B Ybar S, plus D + S A F when `extra` is given.
BlockMatrix s_rhs(const BlockMatrix& s, const StructureMatrix& b, const BlockMatrix& ybar,
                  const std::optional<SExtra>& extra = std::nullopt);

// -R C Z, plus E + G A R when `extra` is given.
BlockMatrix r_riccati_rhs(const BlockMatrix& r, const StructureMatrix& c, const BlockMatrix& z,
                          const std::optional<RExtra>& extra = std::nullopt);

struct TrajectoryPoint {
  double tau;
  Matrix value;
};
using Trajectory = std::vector<TrajectoryPoint>;

using MatrixRhs = std::function<Matrix(const Matrix&, double)>;

// Classical fixed-step RK4. The trajectory holds steps + 1 points including
// both endpoints. Divergence error (naming tau) on any non-finite value.
Trajectory integrate(const MatrixRhs& rhs, const Matrix& init, double tau0, double tau1, int steps);

// Plain block product S A R.
BlockMatrix compose_T(const BlockMatrix& s, const BlockMatrix& a, const BlockMatrix& r);

// The same product written out block by block with the constant-A aliases
// a = A1, d = A2, b = A3, c = A4:
//   T1 = (S1 a + S2 b) R1 + (S1 d + S2 c) R3, etc.
BlockMatrix compose_T_blockwise(const BlockMatrix& s, const BlockMatrix& a, const BlockMatrix& r);

enum class Differencing { kSecondOrder, kFourthOrder };

// Central-difference derivative at interior points. Second order uses the
// three-point stencil on any increasing grid; fourth order needs a uniform grid
// and skips two points at each end.
Trajectory differentiate(const Trajectory& traj, Differencing order = Differencing::kSecondOrder);

// max over interior points of |dT/dtau + T C Z - B Ybar T|, entrywise.
double transport_residual(const Trajectory& traj, const StructureMatrix& c, const MatrixFunction& z,
                          const StructureMatrix& b, const MatrixFunction& ybar,
                          Differencing order = Differencing::kSecondOrder);

// tau followed by row-major entries, 17 significant digits, one row per point.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

// Largest entrywise difference between two trajectories on identical grids.
double trajectory_distance(const Trajectory& a, const Trajectory& b);

}  // namespace linemap
