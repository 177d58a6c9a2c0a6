#pragma once

// Residuals of the compatibility condition and the matrix Riccati equation
// for T = S A R, and the family of exact S, A, R, D, E built on the flat
// closed-form T.

#include <optional>
#include <string>
#include <vector>

#include "linemap/flat_mapping.hpp"
#include "linemap/polynomial.hpp"
#include "linemap/transport.hpp"

namespace linemap {

enum class FamilyVariant {
  kFirst,   // A1, A2 solved for; A3, A4 free
  kSecond,  // A1, A3 solved for; A2, A4 free
};

std::string to_string(FamilyVariant variant);

// Arbitrary functions are n x n polynomials in tau (2n x 2n for the F and G
// blocks); an absent function is zero. Integrals run from `lower_limit`.
struct RiccatiFamilyParams {
  Matrix s3, s4, r1, r3;

  // first variant
  std::optional<Matrix> v1, v2;
  std::optional<MatrixPolynomial> f, g, a3fun;
  // second variant
  std::optional<Matrix> u1, u2;
  std::optional<MatrixPolynomial> l, m, a2fun;
  // both
  std::optional<MatrixPolynomial> a4fun;
  std::optional<MatrixPolynomial> fblocks, gblocks;

  double lower_limit = 0.0;

  int n() const { return static_cast<int>(s3.rows()); }
};

struct FamilyMember {
  int n = 0;
  FamilyVariant variant = FamilyVariant::kFirst;
  BlockFunction smat, rmat, amat, dmat, emat, fmat, gmat;
};

// Size errors on shapes, usage error when parameters of the other variant are
// present, conditioning error when s3 or r1 is not invertible.
FamilyMember build_family(const RiccatiFamilyParams& params, FamilyVariant variant, const Matrix& y4,
                          const Matrix& z4, const Reparameterization& rep = Reparameterization::identity());

// The constant middle factor [S3 S4] A [R1; R3] that the free functions must
// leave unchanged; it equals T3 of the closed form:
//   first:  S3 (V1 R1 + V2 R3)
//   second: (S3 U1 + S4 U2) R1
Matrix expected_t3(const RiccatiFamilyParams& params, FamilyVariant variant);

// Largest coefficient of the polynomial whose vanishing keeps the middle
// factor constant: f R1 + g R3 (first) or S3 R1^-1 l + S4 R1^-1 m (second).
double closure_defect(const RiccatiFamilyParams& params, FamilyVariant variant);

// Returns params with g (first) or m (second) replaced so that the closure
// defect vanishes: g = -f R1 R3^-1, m = -R1 S4^-1 S3 R1^-1 l.
// Conditioning error when R3 (first) or S4 (second) cannot be inverted.
RiccatiFamilyParams close_family(const RiccatiFamilyParams& params, FamilyVariant variant);

// A copy of `member` with `delta` added to the A1 block at every tau.
FamilyMember perturb_a1(const FamilyMember& member, const Matrix& delta);

// max over interior points of |S Adot R + D A R + S A E + S A (F + G) A R|,
// with Adot by central differences of the sampled A.
double compatibility_residual(const MatrixFunction& s, const Trajectory& a_traj, const MatrixFunction& r,
                              const MatrixFunction& d, const MatrixFunction& e, const MatrixFunction& f,
                              const MatrixFunction& g);

// max over interior points of |Adot + S^-1 D A + A E R^-1 + A (F + G) A|.
// Conditioning error naming tau when S or R exceeds `condition_limit`.
double riccati_residual(const Trajectory& a_traj, const MatrixFunction& s, const MatrixFunction& r,
                        const MatrixFunction& d, const MatrixFunction& e, const MatrixFunction& f,
                        const MatrixFunction& g, double condition_limit = kDefaultConditionLimit);

struct MemberReport {
  double max_T_mismatch = 0.0;  // relative to max(1, |T|)
  double compat_residual = 0.0;
  std::optional<double> riccati_residual;  // empty when the gate refused
  std::string riccati_note;                // reason for a refusal
};

// `grid` must be uniform with at least three points.
MemberReport verify_member(const FamilyMember& member, const ClosedFormT& closed_t, const std::vector<double>& grid);

std::vector<double> uniform_grid(double tau0, double tau1, int points);

// Integrates the full S and R systems with D = -S A F and E = -G A R against
// the reduced ones (B = C = J, constant A) from the same initial data.
struct ReductionCase {
  MatrixFunction ybar;  // 2n x 2n
  MatrixFunction z;     // 2n x 2n
  Matrix a;             // constant A
  MatrixFunction fmat;
  MatrixFunction gmat;
  Matrix s0, r0;
  double tau0 = 0.0;
  double tau1 = 1.0;
  int steps = 1000;
};

struct ReductionResult {
  double s_distance = 0.0;
  double r_distance = 0.0;
  Trajectory s_full, s_reduced, r_full, r_reduced;
};

ReductionResult reduction_check(const ReductionCase& c);

}  // namespace linemap
