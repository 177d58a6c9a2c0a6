#include "linemap/transport.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <sstream>

#include "linemap/error.hpp"
#include "linemap/simd/kernels.hpp"

namespace linemap {

BlockMatrix::BlockMatrix(Matrix dense) : dense_(std::move(dense)) {
  if (dense_.rows() != dense_.cols() || dense_.rows() < 2 || dense_.rows() % 2 != 0) {
    std::ostringstream os;
    os << "block matrix must be 2n x 2n, got " << dense_.rows() << "x" << dense_.cols();
    throw Error(ErrorKind::kSize, os.str());
  }
}

BlockMatrix BlockMatrix::assemble(const Matrix& b1, const Matrix& b2, const Matrix& b3, const Matrix& b4) {
  const long n = b1.rows();
  for (const Matrix* b : {&b1, &b2, &b3, &b4}) {
    require_size(b->rows(), n, "block rows");
    require_size(b->cols(), n, "block cols");
  }
  Matrix dense(2 * n, 2 * n);
  dense << b1, b2, b3, b4;
  return BlockMatrix(std::move(dense));
}

Matrix BlockMatrix::block(int index) const {
  const int k = n();
  switch (index) {
    case 1: return dense_.topLeftCorner(k, k);
    case 2: return dense_.topRightCorner(k, k);
    case 3: return dense_.bottomLeftCorner(k, k);
    case 4: return dense_.bottomRightCorner(k, k);
    default: throw Error(ErrorKind::kUsage, "block index must be 1..4");
  }
}

TransportState TransportState::linear(BlockMatrix t, double tau) {
  const int dim = 2 * t.n();
  return TransportState{std::move(t), Vector::Zero(dim), tau, false};
}

TransportState TransportState::affine_map(BlockMatrix t, Vector r, double tau) {
  require_size(r.size(), 2 * t.n(), "affine shift length");
  return TransportState{std::move(t), std::move(r), tau, true};
}

namespace {

void require_same_n(int a, int b, const char* what) { require_size(b, a, what); }

}  // namespace

BlockMatrix t_rhs(const BlockMatrix& t, const StructureMatrix& c, const BlockMatrix& z,
                  const StructureMatrix& b, const BlockMatrix& ybar) {
  const int n = t.n();
  require_same_n(n, c.n(), "C vs T");
  require_same_n(n, z.n(), "Z vs T");
  require_same_n(n, b.n(), "B vs T");
  require_same_n(n, ybar.n(), "Ybar vs T");
  return BlockMatrix(b.value() * ybar.dense() * t.dense() - t.dense() * c.value() * z.dense());
}

Vector r_rhs(const BlockMatrix& t, const Vector& r, const StructureMatrix& c, const StructureMatrix& k,
             const CoefficientSet& coeff, const Reparameterization& rep, double tau) {
  const int dim = 2 * t.n();
  require_size(r.size(), dim, "r length");
  require_size(c.value().rows(), dim, "C dimension");
  require_size(k.value().rows(), dim, "K dimension");
  require_size(coeff.ybar.rows(), dim, "Ybar dimension");
  require_size(coeff.ebar.size(), dim, "Ebar length");
  require_size(coeff.gbar.size(), dim, "Gbar length");
  return k.value() * (coeff.ybar * r + rep.dt_dtau(tau) * coeff.ebar) - t.dense() * c.value() * coeff.gbar;
}

BlockMatrix s_rhs(const BlockMatrix& s, const StructureMatrix& b, const BlockMatrix& ybar,
                  const std::optional<SExtra>& extra) {
  const int n = s.n();
  require_same_n(n, b.n(), "B vs S");
  require_same_n(n, ybar.n(), "Ybar vs S");
  Matrix out = b.value() * ybar.dense() * s.dense();
  if (extra) {
    require_same_n(n, extra->dmat.n(), "D vs S");
    require_same_n(n, extra->amat.n(), "A vs S");
    require_same_n(n, extra->fmat.n(), "F vs S");
    out += extra->dmat.dense() + s.dense() * extra->amat.dense() * extra->fmat.dense();
  }
  return BlockMatrix(std::move(out));
}

BlockMatrix r_riccati_rhs(const BlockMatrix& r, const StructureMatrix& c, const BlockMatrix& z,
                          const std::optional<RExtra>& extra) {
  const int n = r.n();
  require_same_n(n, c.n(), "C vs R");
  require_same_n(n, z.n(), "Z vs R");
  Matrix out = -r.dense() * c.value() * z.dense();
  if (extra) {
    require_same_n(n, extra->emat.n(), "E vs R");
    require_same_n(n, extra->gmat.n(), "G vs R");
    require_same_n(n, extra->amat.n(), "A vs R");
    out += extra->emat.dense() + extra->gmat.dense() * extra->amat.dense() * r.dense();
  }
  return BlockMatrix(std::move(out));
}

namespace {

std::span<double> span_of(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const double> span_of(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

Matrix checked_eval(const MatrixRhs& rhs, const Matrix& y, double tau) {
  Matrix k = rhs(y, tau);
  if (k.rows() != y.rows() || k.cols() != y.cols()) {
    throw Error(ErrorKind::kSize, "integrate: right-hand side changed the state shape");
  }
  if (!k.allFinite()) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite derivative at tau=" << tau;
    throw Error(ErrorKind::kDivergence, os.str());
  }
  return k;
}

}  // namespace

Trajectory integrate(const MatrixRhs& rhs, const Matrix& init, double tau0, double tau1, int steps) {
  if (steps < 1) throw Error(ErrorKind::kUsage, "integrate needs steps >= 1");
  if (!init.allFinite()) throw Error(ErrorKind::kDivergence, "non-finite initial state");
  const double h = (tau1 - tau0) / steps;
  Trajectory traj;
  traj.reserve(static_cast<std::size_t>(steps) + 1);
  traj.push_back({tau0, init});

  Matrix y = init;
  Matrix stage(y.rows(), y.cols());
  for (int i = 0; i < steps; ++i) {
    // tau from the step index, not by accumulation, so grids are reproducible
    const double tau = tau0 + i * h;
    const double tau_half = tau + 0.5 * h;
    const double tau_next = (i + 1 == steps) ? tau1 : tau0 + (i + 1) * h;

    const Matrix k1 = checked_eval(rhs, y, tau);
    stage = y;
    simd::axpy(0.5 * h, span_of(k1), span_of(stage));
    const Matrix k2 = checked_eval(rhs, stage, tau_half);
    stage = y;
    simd::axpy(0.5 * h, span_of(k2), span_of(stage));
    const Matrix k3 = checked_eval(rhs, stage, tau_half);
    stage = y;
    simd::axpy(h, span_of(k3), span_of(stage));
    const Matrix k4 = checked_eval(rhs, stage, tau_next);

    simd::axpy(h / 6.0, span_of(k1), span_of(y));
    simd::axpy(h / 3.0, span_of(k2), span_of(y));
    simd::axpy(h / 3.0, span_of(k3), span_of(y));
    simd::axpy(h / 6.0, span_of(k4), span_of(y));
    if (!y.allFinite()) {
      std::ostringstream os;
      os.precision(17);
      os << "non-finite state at tau=" << tau_next;
      throw Error(ErrorKind::kDivergence, os.str());
    }
    traj.push_back({tau_next, y});
  }
  return traj;
}

BlockMatrix compose_T(const BlockMatrix& s, const BlockMatrix& a, const BlockMatrix& r) {
  require_same_n(s.n(), a.n(), "A vs S");
  require_same_n(s.n(), r.n(), "R vs S");
  return BlockMatrix(s.dense() * a.dense() * r.dense());
}

BlockMatrix compose_T_blockwise(const BlockMatrix& s, const BlockMatrix& a, const BlockMatrix& r) {
  require_same_n(s.n(), a.n(), "A vs S");
  require_same_n(s.n(), r.n(), "R vs S");
  const Matrix a_ = a.b1(), d_ = a.b2(), b_ = a.b3(), c_ = a.b4();
  const Matrix s1 = s.b1(), s2 = s.b2(), s3 = s.b3(), s4 = s.b4();
  const Matrix r1 = r.b1(), r2 = r.b2(), r3 = r.b3(), r4 = r.b4();
  const Matrix top_left = s1 * a_ + s2 * b_;
  const Matrix top_right = s1 * d_ + s2 * c_;
  const Matrix bottom_left = s3 * a_ + s4 * b_;
  const Matrix bottom_right = s3 * d_ + s4 * c_;
  return BlockMatrix::assemble(top_left * r1 + top_right * r3, top_left * r2 + top_right * r4,
                               bottom_left * r1 + bottom_right * r3, bottom_left * r2 + bottom_right * r4);
}

Trajectory differentiate(const Trajectory& traj, Differencing order) {
  const std::size_t count = traj.size();
  Trajectory out;
  if (order == Differencing::kSecondOrder) {
    if (count < 3) throw Error(ErrorKind::kSize, "differencing needs at least 3 points");
    out.reserve(count - 2);
    for (std::size_t k = 1; k + 1 < count; ++k) {
      const double span = traj[k + 1].tau - traj[k - 1].tau;
      out.push_back({traj[k].tau, (traj[k + 1].value - traj[k - 1].value) / span});
    }
    return out;
  }
  if (count < 5) throw Error(ErrorKind::kSize, "fourth-order differencing needs at least 5 points");
  const double h = (traj.back().tau - traj.front().tau) / static_cast<double>(count - 1);
  for (std::size_t k = 1; k < count; ++k) {
    const double gap = traj[k].tau - traj[k - 1].tau;
    if (std::fabs(gap - h) > 1e-9 * std::fabs(h)) {
      throw Error(ErrorKind::kUsage, "fourth-order differencing needs a uniform grid");
    }
  }
  out.reserve(count - 4);
  for (std::size_t k = 2; k + 2 < count; ++k) {
    out.push_back({traj[k].tau, (-traj[k + 2].value + 8.0 * traj[k + 1].value - 8.0 * traj[k - 1].value +
                                 traj[k - 2].value) /
                                    (12.0 * h)});
  }
  return out;
}

double transport_residual(const Trajectory& traj, const StructureMatrix& c, const MatrixFunction& z,
                          const StructureMatrix& b, const MatrixFunction& ybar, Differencing order) {
  const Trajectory deriv = differentiate(traj, order);
  // differentiate() drops the same number of points at both ends
  const std::size_t offset = (traj.size() - deriv.size()) / 2;
  double worst = 0.0;
  for (std::size_t k = 0; k < deriv.size(); ++k) {
    const Matrix& t = traj[k + offset].value;
    const double tau = deriv[k].tau;
    const Matrix balance = b.value() * ybar(tau) * t - t * c.value() * z(tau);
    const double r = max_abs_diff(deriv[k].value, balance);
    if (std::isnan(r)) return r;
    worst = std::max(worst, r);
  }
  return worst;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  if (traj.empty()) return;
  const long rows = traj.front().value.rows();
  const long cols = traj.front().value.cols();
  out << "tau";
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) out << ",m_" << i << "_" << j;
  }
  out << '\n';
  char buf[32];
  for (const TrajectoryPoint& p : traj) {
    std::snprintf(buf, sizeof buf, "%.17g", p.tau);
    out << buf;
    for (long i = 0; i < rows; ++i) {
      for (long j = 0; j < cols; ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", p.value(i, j));
        out << ',' << buf;
      }
    }
    out << '\n';
  }
}

double trajectory_distance(const Trajectory& a, const Trajectory& b) {
  require_size(static_cast<long>(b.size()), static_cast<long>(a.size()), "trajectory lengths");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].tau != b[k].tau) throw Error(ErrorKind::kUsage, "trajectories are on different grids");
    worst = std::max(worst, max_abs_diff(a[k].value, b[k].value));
  }
  return worst;
}

}  // namespace linemap
