#include "linemap/flat_mapping.hpp"

#include <cmath>
#include <span>

#include "linemap/error.hpp"
#include "linemap/simd/kernels.hpp"

namespace linemap {

FlatHamiltonian::FlatHamiltonian(std::vector<int> signature) : signature_(std::move(signature)) {
  if (signature_.empty()) throw Error(ErrorKind::kSize, "empty signature");
  for (int s : signature_) {
    if (s != 1 && s != -1) throw Error(ErrorKind::kUsage, "signature entries must be +1 or -1");
  }
}

Matrix signature_matrix(const std::vector<int>& signature) {
  Matrix d = Matrix::Zero(static_cast<long>(signature.size()), static_cast<long>(signature.size()));
  for (std::size_t i = 0; i < signature.size(); ++i) d(static_cast<long>(i), static_cast<long>(i)) = signature[i];
  return d;
}

Matrix FlatHamiltonian::diag() const { return signature_matrix(signature_); }

double FlatHamiltonian::value(const Vector& momenta) const {
  require_size(momenta.size(), m(), "flat momenta length");
  std::vector<double> w(signature_.begin(), signature_.end());
  const std::span<const double> p(momenta.data(), static_cast<std::size_t>(momenta.size()));
  return 0.5 * simd::weighted_dot(w, p, p);
}

void require_signature_matrix(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::kSize, std::string(what) + " must be square");
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      const bool ok = (i == j) ? (v == 1.0 || v == -1.0) : (v == 0.0);
      if (!ok) throw Error(ErrorKind::kUsage, std::string(what) + " must be diagonal with +1/-1 entries");
    }
  }
}

void ClosedFormT::validate() const {
  require_size(t3.rows(), t3.cols(), "T3 must be square");
  require_size(y4.rows(), t3.rows(), "Y4 size");
  require_size(z4.rows(), t3.rows(), "Z4 size");
  require_signature_matrix(y4, "Y4");
  require_signature_matrix(z4, "Z4");
}

BlockMatrix closed_form_T(const ClosedFormT& cf, double tau) {
  cf.validate();
  const double t = cf.rep.t_of_tau(tau);
  const Matrix y4t3 = cf.y4 * cf.t3;
  const Matrix t3z4 = cf.t3 * cf.z4;
  return BlockMatrix::assemble(y4t3 * t, -(y4t3 * cf.z4) * (t * tau), cf.t3, -t3z4 * tau);
}

BlockMatrix closed_form_T_derivative(const ClosedFormT& cf, double tau) {
  cf.validate();
  const double t = cf.rep.t_of_tau(tau);
  const double dt = cf.rep.dt_dtau(tau);
  const Matrix y4t3 = cf.y4 * cf.t3;
  const long m = cf.t3.rows();
  return BlockMatrix::assemble(y4t3 * dt, -(y4t3 * cf.z4) * (dt * tau + t), Matrix::Zero(m, m),
                               -(cf.t3 * cf.z4));
}

BlockMatrix flat_z(const Matrix& z4) {
  const long m = z4.rows();
  const Matrix zero = Matrix::Zero(m, m);
  return BlockMatrix::assemble(zero, zero, zero, z4);
}

BlockMatrix flat_ybar(const Matrix& y4, double dt_dtau) {
  const long m = y4.rows();
  const Matrix zero = Matrix::Zero(m, m);
  return BlockMatrix::assemble(zero, zero, zero, dt_dtau * y4);
}

double closed_form_residual(const ClosedFormT& cf, double tau) {
  const BlockMatrix t = closed_form_T(cf, tau);
  const BlockMatrix dt = closed_form_T_derivative(cf, tau);
  const StructureMatrix j = StructureMatrix::symplectic(cf.m());
  const BlockMatrix rhs = t_rhs(t, j, flat_z(cf.z4), j, flat_ybar(cf.y4, cf.rep.dt_dtau(tau)));
  return max_abs_diff(dt.dense(), rhs.dense());
}

PhaseVector map_phase(const BlockMatrix& t, const PhaseVector& state) {
  require_size(state.n(), t.n(), "phase state vs T");
  return PhaseVector(t.dense() * state.components());
}

CoordinateMatrices build_w12(double sigma_bar, const Matrix& ebar_frame, const Matrix& t1, const Matrix& t2) {
  const long n = ebar_frame.rows();
  require_size(ebar_frame.cols(), n, "target frame must be square");
  require_size(t1.rows(), t1.cols(), "T1 must be square");
  require_size(t2.rows(), t1.rows(), "T2 size");
  if (t1.rows() < n) throw Error(ErrorKind::kSize, "T blocks smaller than the frame");
  const Matrix scaled_inverse = std::exp(-sigma_bar) * checked_inverse(ebar_frame, "target frame", 1e10);
  return CoordinateMatrices{scaled_inverse * t1.topRows(n), scaled_inverse * t2.topRows(n)};
}

std::string to_string(MConvention convention) {
  return convention == MConvention::kLiteral ? "literal" : "derivation-consistent";
}

namespace {

Matrix scaled_inverse_frame(const TargetFrame& frame, double t) {
  return std::exp(-frame.sigma_bar(t)) * checked_inverse(frame.ebar_frame(t), "target frame", 1e10);
}

}  // namespace

MappingMatrices build_mapping(double t, const TargetFrame& frame, const Matrix& y4, const BlockMatrix& tmat,
                              const Matrix& gbar_target, MConvention convention) {
  const Matrix frame_now = frame.ebar_frame(t);
  const long n = frame_now.rows();
  const long m = tmat.n();
  require_size(y4.rows(), m, "Y4 size");
  require_size(gbar_target.rows(), n, "target metric size");
  require_size(gbar_target.cols(), n, "target metric size");

  MappingMatrices out;
  const CoordinateMatrices w12 = build_w12(frame.sigma_bar(t), frame_now, tmat.b1(), tmat.b2());
  out.w1 = w12.w1;
  out.w2 = w12.w2;

  const double h = 1e-5 * std::max(1.0, std::fabs(t));
  const Matrix n_now = scaled_inverse_frame(frame, t);
  const Matrix n_dot = (scaled_inverse_frame(frame, t + h) - scaled_inverse_frame(frame, t - h)) / (2.0 * h);

  const Matrix t1_rows = tmat.b1().topRows(n);
  const Matrix t2_rows = tmat.b2().topRows(n);
  out.m1 = n_dot * (convention == MConvention::kLiteral ? t2_rows : t1_rows);
  out.m2 = n_dot * t2_rows;
  out.m3 = n_now * (y4 * tmat.b3()).topRows(n);
  out.m4 = n_now * (y4 * tmat.b4()).topRows(n);
  out.w3_upper = out.m1 + out.m3;
  out.w4_upper = out.m2 + out.m4;
  out.w3 = gbar_target * out.w3_upper;
  out.w4 = gbar_target * out.w4_upper;
  return out;
}

MappedState map_coordinates(const MappingMatrices& w, const Vector& y, const Vector& p) {
  require_size(y.size(), w.w1.cols(), "Y length");
  require_size(p.size(), w.w2.cols(), "P length");
  require_size(w.w3.cols(), w.w1.cols(), "W3 cols");
  require_size(w.w4.cols(), w.w2.cols(), "W4 cols");
  return MappedState{w.w1 * y + w.w2 * p, w.w3 * y + w.w4 * p};
}

EqualityReport hamiltonian_equality_check(double q_val, double hhat_val, double h_val) {
  EqualityReport r;
  r.q = q_val;
  r.hhat = hhat_val;
  r.h = h_val;
  r.max_pairwise_diff =
      std::max({std::fabs(q_val - hhat_val), std::fabs(q_val - h_val), std::fabs(hhat_val - h_val)});
  r.tolerance = 1e-10 * std::max(1.0, std::fabs(h_val));
  r.pass = r.max_pairwise_diff <= r.tolerance;
  return r;
}

Matrix conformal_target_metric(const TargetFrame& frame, const std::vector<int>& flat_signature, double t) {
  const Matrix e = frame.ebar_frame(t);
  require_size(static_cast<long>(flat_signature.size()), e.rows(), "target flat signature length");
  return std::exp(2.0 * frame.sigma_bar(t)) * (e.transpose() * signature_matrix(flat_signature) * e);
}

HamiltonOracleResult hamilton_equation_oracle(const HamiltonOracleScenario& sc, double tolerance) {
  const ClosedFormT& cf = sc.transport;
  cf.validate();
  require_size(sc.y0.size(), cf.m(), "source coordinates length");
  require_size(sc.p0.size(), cf.m(), "source momenta length");

  // Source flow of H = 1/2 eta P P: Y' = Z4 P, P' = 0.
  auto source_y = [&](double tau) -> Vector { return sc.y0 + cf.z4 * sc.p0 * tau; };
  auto u_bar_at = [&](double tau) -> Vector {
    const double t = cf.rep.t_of_tau(tau);
    const BlockMatrix tm = closed_form_T(cf, tau);
    const CoordinateMatrices w = build_w12(sc.frame.sigma_bar(t), sc.frame.ebar_frame(t), tm.b1(), tm.b2());
    return w.w1 * source_y(tau) + w.w2 * sc.p0;
  };

  HamiltonOracleResult result;
  result.tolerance = tolerance;
  for (double tau : sc.taus) {
    const double d = sc.difference_step;
    const double dt = cf.rep.t_of_tau(tau + d) - cf.rep.t_of_tau(tau - d);
    const Vector du_dt = (u_bar_at(tau + d) - u_bar_at(tau - d)) / dt;
    const double t = cf.rep.t_of_tau(tau);
    const Matrix gbar = conformal_target_metric(sc.frame, sc.target_flat_signature, t);
    const Vector p_expected = gbar * du_dt;
    const double scale = std::max(1.0, p_expected.cwiseAbs().maxCoeff());
    const BlockMatrix tm = closed_form_T(cf, tau);

    for (MConvention conv : {MConvention::kLiteral, MConvention::kDerivationConsistent}) {
      const MappingMatrices w = build_mapping(t, sc.frame, cf.y4, tm, gbar, conv);
      const MappedState mapped = map_coordinates(w, source_y(tau), sc.p0);
      const double err = (mapped.p_bar - p_expected).cwiseAbs().maxCoeff() / scale;
      double& slot = conv == MConvention::kLiteral ? result.literal_error : result.consistent_error;
      slot = std::max(slot, err);
    }
  }
  result.literal_pass = result.literal_error <= tolerance;
  result.consistent_pass = result.consistent_error <= tolerance;
  if (result.literal_pass && result.consistent_pass) {
    result.satisfied_by = "both";
  } else if (result.consistent_pass) {
    result.satisfied_by = to_string(MConvention::kDerivationConsistent);
  } else if (result.literal_pass) {
    result.satisfied_by = to_string(MConvention::kLiteral);
  } else {
    result.satisfied_by = "neither";
  }
  return result;
}

}  // namespace linemap
