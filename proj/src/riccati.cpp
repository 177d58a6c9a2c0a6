#include "linemap/riccati.hpp"

#include <cmath>
#include <sstream>

#include "linemap/error.hpp"

namespace linemap {

std::string to_string(FamilyVariant variant) { return variant == FamilyVariant::kFirst ? "first" : "second"; }

namespace {

MatrixPolynomial or_zero(const std::optional<MatrixPolynomial>& p, int rows, int cols, const char* what) {
  if (!p) return MatrixPolynomial::zero(rows, cols);
  require_size(p->rows(), rows, std::string(what) + " rows");
  require_size(p->cols(), cols, std::string(what) + " cols");
  return *p;
}

Matrix or_zero(const std::optional<Matrix>& m, int n, const char* what) {
  if (!m) return Matrix::Zero(n, n);
  require_size(m->rows(), n, std::string(what) + " rows");
  require_size(m->cols(), n, std::string(what) + " cols");
  return *m;
}

void require_square(const Matrix& m, int n, const char* what) {
  require_size(m.rows(), n, std::string(what) + " rows");
  require_size(m.cols(), n, std::string(what) + " cols");
}

void check_params(const RiccatiFamilyParams& p, FamilyVariant variant) {
  const int n = p.n();
  if (n < 1) throw Error(ErrorKind::kSize, "family needs n >= 1");
  require_square(p.s3, n, "S3");
  require_square(p.s4, n, "S4");
  require_square(p.r1, n, "R1");
  require_square(p.r3, n, "R3");
  const bool first_only = p.v1 || p.v2 || p.f || p.g || p.a3fun;
  const bool second_only = p.u1 || p.u2 || p.l || p.m || p.a2fun;
  if (variant == FamilyVariant::kFirst && second_only) {
    throw Error(ErrorKind::kUsage, "first variant given U1/U2/l/m/A2 parameters");
  }
  if (variant == FamilyVariant::kSecond && first_only) {
    throw Error(ErrorKind::kUsage, "second variant given V1/V2/f/g/A3 parameters");
  }
}

std::string tau_text(double tau) {
  std::ostringstream os;
  os.precision(17);
  os << tau;
  return os.str();
}

}  // namespace

Matrix expected_t3(const RiccatiFamilyParams& p, FamilyVariant variant) {
  check_params(p, variant);
  const int n = p.n();
  if (variant == FamilyVariant::kFirst) {
    return p.s3 * (or_zero(p.v1, n, "V1") * p.r1 + or_zero(p.v2, n, "V2") * p.r3);
  }
  return (p.s3 * or_zero(p.u1, n, "U1") + p.s4 * or_zero(p.u2, n, "U2")) * p.r1;
}

double closure_defect(const RiccatiFamilyParams& p, FamilyVariant variant) {
  check_params(p, variant);
  const int n = p.n();
  if (variant == FamilyVariant::kFirst) {
    const MatrixPolynomial f = or_zero(p.f, n, n, "f");
    const MatrixPolynomial g = or_zero(p.g, n, n, "g");
    return (f.right_multiplied(p.r1) + g.right_multiplied(p.r3)).max_abs_coeff();
  }
  const Matrix r1_inv = checked_inverse(p.r1, "R1");
  const MatrixPolynomial l = or_zero(p.l, n, n, "l");
  const MatrixPolynomial m = or_zero(p.m, n, n, "m");
  return (l.left_multiplied(p.s3 * r1_inv) + m.left_multiplied(p.s4 * r1_inv)).max_abs_coeff();
}

RiccatiFamilyParams close_family(const RiccatiFamilyParams& p, FamilyVariant variant) {
  check_params(p, variant);
  const int n = p.n();
  RiccatiFamilyParams out = p;
  if (variant == FamilyVariant::kFirst) {
    const Matrix r3_inv = checked_inverse(p.r3, "R3");
    out.g = or_zero(p.f, n, n, "f").right_multiplied(-(p.r1 * r3_inv));
  } else {
    const Matrix r1_inv = checked_inverse(p.r1, "R1");
    const Matrix s4_inv = checked_inverse(p.s4, "S4");
    out.m = or_zero(p.l, n, n, "l").left_multiplied(-(p.r1 * s4_inv * p.s3 * r1_inv));
  }
  return out;
}

FamilyMember build_family(const RiccatiFamilyParams& p, FamilyVariant variant, const Matrix& y4, const Matrix& z4,
                          const Reparameterization& rep) {
  check_params(p, variant);
  const int n = p.n();
  require_square(y4, n, "Y4");
  require_square(z4, n, "Z4");
  require_signature_matrix(y4, "Y4");
  require_signature_matrix(z4, "Z4");
  const Matrix s3_inv = checked_inverse(p.s3, "S3");
  const Matrix r1_inv = checked_inverse(p.r1, "R1");

  const Matrix s3 = p.s3, s4 = p.s4, r1 = p.r1, r3 = p.r3;
  const MatrixPolynomial fblocks = or_zero(p.fblocks, 2 * n, 2 * n, "F");
  const MatrixPolynomial gblocks = or_zero(p.gblocks, 2 * n, 2 * n, "G");
  const MatrixPolynomial a4 = or_zero(p.a4fun, n, n, "A4");

  FamilyMember member;
  member.n = n;
  member.variant = variant;

  member.smat = [=](double tau) {
    const double t = rep.t_of_tau(tau);
    return BlockMatrix::assemble(y4 * s3 * t, y4 * s4 * t, s3, s4);
  };
  member.rmat = [=](double tau) { return BlockMatrix::assemble(r1, -(r1 * z4) * tau, r3, -(r3 * z4) * tau); };

  if (variant == FamilyVariant::kFirst) {
    const MatrixPolynomial a3 = or_zero(p.a3fun, n, n, "A3");
    const MatrixPolynomial f_int = or_zero(p.f, n, n, "f").running_integral(p.lower_limit);
    const MatrixPolynomial g_int = or_zero(p.g, n, n, "g").running_integral(p.lower_limit);
    const Matrix v1 = or_zero(p.v1, n, "V1");
    const Matrix v2 = or_zero(p.v2, n, "V2");
    const Matrix s3_inv_s4 = s3_inv * s4;
    member.amat = [=](double tau) {
      const Matrix a3v = a3(tau);
      const Matrix a4v = a4(tau);
      const Matrix a1v = -s3_inv_s4 * a3v + s3_inv * f_int(tau) + v1;
      const Matrix a2v = -s3_inv_s4 * a4v + s3_inv * g_int(tau) + v2;
      return BlockMatrix::assemble(a1v, a2v, a3v, a4v);
    };
  } else {
    const MatrixPolynomial a2 = or_zero(p.a2fun, n, n, "A2");
    const MatrixPolynomial l_int = or_zero(p.l, n, n, "l").running_integral(p.lower_limit);
    const MatrixPolynomial m_int = or_zero(p.m, n, n, "m").running_integral(p.lower_limit);
    const Matrix u1 = or_zero(p.u1, n, "U1");
    const Matrix u2 = or_zero(p.u2, n, "U2");
    const Matrix r3_r1_inv = r3 * r1_inv;
    member.amat = [=](double tau) {
      const Matrix a2v = a2(tau);
      const Matrix a4v = a4(tau);
      const Matrix a1v = -a2v * r3_r1_inv + r1_inv * l_int(tau) + u1;
      const Matrix a3v = -a4v * r3_r1_inv + r1_inv * m_int(tau) + u2;
      return BlockMatrix::assemble(a1v, a2v, a3v, a4v);
    };
  }

  member.fmat = [fblocks](double tau) { return BlockMatrix(fblocks(tau)); };
  member.gmat = [gblocks](double tau) { return BlockMatrix(gblocks(tau)); };

  // D3, D4 and E1, E3 from the constant S3, S4, R1, R3; the remaining blocks
  // follow the S and R pattern (D1 = Y4 D3 t, E2 = -E1 Z4 tau, ...).
  const BlockFunction amat = member.amat;
  member.dmat = [=](double tau) {
    const double t = rep.t_of_tau(tau);
    const BlockMatrix a = amat(tau);
    const BlockMatrix f(fblocks(tau));
    const Matrix a1 = a.b1(), a2 = a.b2(), a3 = a.b3(), a4 = a.b4();
    const Matrix f1 = f.b1(), f2 = f.b2(), f3 = f.b3(), f4 = f.b4();
    const Matrix d3 = -(s3 * (a1 * f1 + a2 * f3) + s4 * (a3 * f1 + a4 * f3));
    const Matrix d4 = -(s3 * (a1 * f2 + a2 * f4) + s4 * (a3 * f2 + a4 * f4));
    return BlockMatrix::assemble(y4 * d3 * t, y4 * d4 * t, d3, d4);
  };
  member.emat = [=](double tau) {
    const BlockMatrix a = amat(tau);
    const BlockMatrix g(gblocks(tau));
    const Matrix top = a.b1() * r1 + a.b2() * r3;
    const Matrix bottom = a.b3() * r1 + a.b4() * r3;
    const Matrix e1 = -(g.b1() * top + g.b2() * bottom);
    const Matrix e3 = -(g.b3() * top + g.b4() * bottom);
    return BlockMatrix::assemble(e1, -(e1 * z4) * tau, e3, -(e3 * z4) * tau);
  };
  return member;
}

FamilyMember perturb_a1(const FamilyMember& member, const Matrix& delta) {
  require_square(delta, member.n, "A1 perturbation");
  FamilyMember out = member;
  const BlockFunction base = member.amat;
  out.amat = [base, delta](double tau) {
    const BlockMatrix a = base(tau);
    return BlockMatrix::assemble(a.b1() + delta, a.b2(), a.b3(), a.b4());
  };
  return out;
}

double compatibility_residual(const MatrixFunction& s, const Trajectory& a_traj, const MatrixFunction& r,
                              const MatrixFunction& d, const MatrixFunction& e, const MatrixFunction& f,
                              const MatrixFunction& g) {
  const Trajectory a_dot = differentiate(a_traj);
  double worst = 0.0;
  for (std::size_t k = 0; k < a_dot.size(); ++k) {
    const double tau = a_dot[k].tau;
    const Matrix& a = a_traj[k + 1].value;
    const Matrix sv = s(tau), rv = r(tau);
    require_size(sv.cols(), a.rows(), "S vs A");
    require_size(rv.rows(), a.cols(), "R vs A");
    const Matrix total =
        sv * a_dot[k].value * rv + d(tau) * a * rv + sv * a * e(tau) + sv * (a * (f(tau) + g(tau)) * a) * rv;
    const double v = max_abs(total);
    if (std::isnan(v)) return v;
    worst = std::max(worst, v);
  }
  return worst;
}

double riccati_residual(const Trajectory& a_traj, const MatrixFunction& s, const MatrixFunction& r,
                        const MatrixFunction& d, const MatrixFunction& e, const MatrixFunction& f,
                        const MatrixFunction& g, double condition_limit) {
  const Trajectory a_dot = differentiate(a_traj);
  double worst = 0.0;
  for (std::size_t k = 0; k < a_dot.size(); ++k) {
    const double tau = a_dot[k].tau;
    const Matrix& a = a_traj[k + 1].value;
    const Matrix s_inv = checked_inverse(s(tau), "S at tau=" + tau_text(tau), condition_limit);
    const Matrix r_inv = checked_inverse(r(tau), "R at tau=" + tau_text(tau), condition_limit);
    const Matrix total = a_dot[k].value + s_inv * d(tau) * a + a * e(tau) * r_inv + a * (f(tau) + g(tau)) * a;
    const double v = max_abs(total);
    if (std::isnan(v)) return v;
    worst = std::max(worst, v);
  }
  return worst;
}

std::vector<double> uniform_grid(double tau0, double tau1, int points) {
  if (points < 2) throw Error(ErrorKind::kUsage, "grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double h = (tau1 - tau0) / (points - 1);
  for (int k = 0; k < points; ++k) grid[static_cast<std::size_t>(k)] = (k + 1 == points) ? tau1 : tau0 + k * h;
  return grid;
}

namespace {
MatrixFunction dense_of(const BlockFunction& fn) {
  return [fn](double tau) { return fn(tau).dense(); };
}
}  // namespace

MemberReport verify_member(const FamilyMember& member, const ClosedFormT& closed_t, const std::vector<double>& grid) {
  if (grid.size() < 3) throw Error(ErrorKind::kSize, "verification grid needs at least 3 points");
  require_size(closed_t.m(), member.n, "closed-form T vs family n");
  MemberReport report;
  Trajectory a_traj;
  a_traj.reserve(grid.size());
  for (double tau : grid) {
    const BlockMatrix a = member.amat(tau);
    const BlockMatrix t = compose_T(member.smat(tau), a, member.rmat(tau));
    const BlockMatrix expected = closed_form_T(closed_t, tau);
    const double scale = std::max(1.0, max_abs(expected.dense()));
    report.max_T_mismatch = std::max(report.max_T_mismatch, max_abs_diff(t.dense(), expected.dense()) / scale);
    a_traj.push_back({tau, a.dense()});
  }
  const MatrixFunction s = dense_of(member.smat), r = dense_of(member.rmat);
  const MatrixFunction d = dense_of(member.dmat), e = dense_of(member.emat);
  const MatrixFunction f = dense_of(member.fmat), g = dense_of(member.gmat);
  report.compat_residual = compatibility_residual(s, a_traj, r, d, e, f, g);
  try {
    report.riccati_residual = riccati_residual(a_traj, s, r, d, e, f, g);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::kConditioning) throw;
    report.riccati_note = err.what();
  }
  return report;
}

ReductionResult reduction_check(const ReductionCase& c) {
  const long dim = c.a.rows();
  if (dim < 2 || dim % 2 != 0) throw Error(ErrorKind::kSize, "A must be 2n x 2n");
  const int n = static_cast<int>(dim / 2);
  require_size(c.s0.rows(), dim, "S0 rows");
  require_size(c.r0.rows(), dim, "R0 rows");
  const StructureMatrix j = StructureMatrix::symplectic(n);
  const BlockMatrix a(c.a);

  const MatrixRhs s_full = [&](const Matrix& s, double tau) {
    const BlockMatrix sb(s);
    const BlockMatrix f(c.fmat(tau));
    const BlockMatrix dmat(-(s * c.a * f.dense()));
    return s_rhs(sb, j, BlockMatrix(c.ybar(tau)), SExtra{dmat, a, f}).dense();
  };
  const MatrixRhs s_reduced = [&](const Matrix& s, double tau) {
    return s_rhs(BlockMatrix(s), j, BlockMatrix(c.ybar(tau))).dense();
  };
  const MatrixRhs r_full = [&](const Matrix& r, double tau) {
    const BlockMatrix g(c.gmat(tau));
    const BlockMatrix emat(-(g.dense() * c.a * r));
    return r_riccati_rhs(BlockMatrix(r), j, BlockMatrix(c.z(tau)), RExtra{emat, g, a}).dense();
  };
  const MatrixRhs r_reduced = [&](const Matrix& r, double tau) {
    return r_riccati_rhs(BlockMatrix(r), j, BlockMatrix(c.z(tau))).dense();
  };

  ReductionResult out;
  out.s_full = integrate(s_full, c.s0, c.tau0, c.tau1, c.steps);
  out.s_reduced = integrate(s_reduced, c.s0, c.tau0, c.tau1, c.steps);
  out.r_full = integrate(r_full, c.r0, c.tau0, c.tau1, c.steps);
  out.r_reduced = integrate(r_reduced, c.r0, c.tau0, c.tau1, c.steps);
  out.s_distance = trajectory_distance(out.s_full, out.s_reduced);
  out.r_distance = trajectory_distance(out.r_full, out.r_reduced);
  return out;
}

}  // namespace linemap
