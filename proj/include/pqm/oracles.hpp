#pragma once

// Numerical realizations of two geometric constructions used in the
// completeness argument: the ellipse construction that grows the angle
// between two rays of a filter, and the decomposition of an incompatible pair
// through a common compatible plane.

#include <cstdint>
#include <vector>

#include "pqm/subspace.hpp"

namespace pqm {

/// x / sqrt(1 - x^2). Throws DomainError unless 0 <= x < 1.
double f_step(double x);

/// Iterates are treated as having reached 1 from this value on.
inline constexpr double kStepClamp = 1.0 - 1e-15;

/// Smallest n with f^n(a) >= 1 (iteration stops at the first iterate >= 1).
/// Throws DomainError unless 0 < a <= 1.
int steps_to_one(double a);

/// a, f(a), f(f(a)), ... up to and including the first iterate >= 1, which is
/// reported as exactly 1.
std::vector<double> step_chain(double a);

struct EllipseWitness {
  double a = 0;
  int dim = 0;
  double x = 0;
  double y = 0;
  /// (a,0,1,0,...) and (-a,0,1,0,...), normalized.
  Vector u_plus, u_minus;
  /// (x,y,1,0,...).
  Vector w;
  Vector v_plus, v_minus;

  Complex w_dot_v_plus;
  Complex w_dot_v_minus;
  Complex v_plus_dot_v_minus;
  /// x^2 + (1 - a^2) y^2 - a^2.
  double ellipse_residual = 0;

  bool orthogonal = false;  // |<v+|v->| < tol
  bool on_ellipse = false;  // |residual| < tol
  /// span(v+, w) and span(v-, w) compatible by the lattice test. Agrees with
  /// `orthogonal` except when w lies in the plane of u+ and u- (y = 0), where
  /// the two spans coincide.
  bool spans_compatible = false;

  /// orthogonal == on_ellipse, and w is orthogonal to both v+ and v-.
  bool consistent() const;
};

/// Throws DomainError unless 0 < a < 1 and dim >= 3.
EllipseWitness ellipse_witness(double a, double x, double y, int dim = 3, double tol = 1e-9);

struct IncompatDecomposition {
  Subspace P = Subspace::bottom(1);
  Subspace Q = Subspace::bottom(1);
  double lambda = 0;
  Vector u;
  Vector v;
  Subspace C = Subspace::bottom(1);

  /// |Pi_P Pi_Q u - lambda u|.
  double eigen_residual = 0;
  bool u_outside_q = false;
  bool v_outside_p = false;
  bool c_compatible_p = false;
  bool c_compatible_q = false;
  bool meet_pc_is_u = false;
  bool meet_qc_is_v = false;

  bool ok() const;
};

/// Eigenpair of the compression of Pi_P Pi_Q to P with eigenvalue in (0,1),
/// closest to 1/2 (ties to the smallest index). Throws PreconditionError if
/// P and Q are compatible.
IncompatDecomposition incompat_decompose(const Subspace& P, const Subspace& Q, const Tolerance& tol = {});

/// One round of the angle-growing construction: the pair (+-c e_theta + e3)
/// becomes the pair (+-w) where w lies on the ellipse of c.
struct ChainRound {
  double c_in = 0;
  double c_out = 0;
  double ellipse_residual = 0;
  /// span(u+, w) and span(u-, w) compatible, with meet span(w); likewise for
  /// the mirrored point.
  bool compatible_plus = false;
  bool compatible_minus = false;
  bool meet_plus = false;
  bool meet_minus = false;
  bool ok() const { return compatible_plus && compatible_minus && meet_plus && meet_minus; }
};

struct EllipseChain {
  double a = 0;
  int dim = 0;
  std::vector<ChainRound> rounds;
  /// The final pair is orthogonal and its meet is bottom.
  bool reaches_bottom = false;

  bool ok() const;
};

/// Runs the construction from the pair (+-a, 0, 1) until the two rays are
/// orthogonal. The number of rounds equals steps_to_one(a).
EllipseChain ellipse_chain(double a, int dim = 3, const Tolerance& tol = {});

}  // namespace pqm
