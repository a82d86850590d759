#include "pqm/oracles.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pqm/error.hpp"

namespace pqm {

double f_step(double x) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("f_step: argument must lie in [0, 1), got " + std::to_string(x));
  return x / std::sqrt(1.0 - x * x);
}

int steps_to_one(double a) {
  return static_cast<int>(step_chain(a).size()) - 1;
}

std::vector<double> step_chain(double a) {
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("steps_to_one: argument must lie in (0, 1], got " + std::to_string(a));
  std::vector<double> chain{a};
  double x = a;
  while (x < kStepClamp) {
    x = f_step(x);
    chain.push_back(x);
  }
  chain.back() = 1.0;
  return chain;
}

// ---------------------------------------------------------------------------

bool EllipseWitness::consistent() const {
  return orthogonal == on_ellipse && std::abs(w_dot_v_plus) < 1e-12 && std::abs(w_dot_v_minus) < 1e-12;
}

namespace {

Vector e13(int dim, double first, double second) {
  Vector v = Vector::Zero(dim);
  v(0) = first;
  v(1) = second;
  v(2) = 1.0;
  return v;
}

Vector remove_component(const Vector& u, const Vector& w) { return u - (w.dot(u) / w.dot(w)) * w; }

}  // namespace

EllipseWitness ellipse_witness(double a, double x, double y, int dim, double tol) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("ellipse_witness: a must lie in (0, 1), got " + std::to_string(a));
  if (dim < 3) throw DomainError("ellipse_witness: dimension must be at least 3");
  EllipseWitness r;
  r.a = a;
  r.dim = dim;
  r.x = x;
  r.y = y;
  r.u_plus = e13(dim, a, 0.0).normalized();
  r.u_minus = e13(dim, -a, 0.0).normalized();
  r.w = e13(dim, x, y);
  r.v_plus = remove_component(r.u_plus, r.w);
  r.v_minus = remove_component(r.u_minus, r.w);
  // Eigen's dot is conjugate-linear in the first argument, like <.|.>.
  r.w_dot_v_plus = r.w.dot(r.v_plus);
  r.w_dot_v_minus = r.w.dot(r.v_minus);
  r.v_plus_dot_v_minus = r.v_plus.dot(r.v_minus);
  r.ellipse_residual = x * x + (1.0 - a * a) * y * y - a * a;
  r.orthogonal = std::abs(r.v_plus_dot_v_minus) < tol;
  r.on_ellipse = std::abs(r.ellipse_residual) < tol;

  Matrix plus(dim, 2), minus(dim, 2);
  plus << r.v_plus, r.w;
  minus << r.v_minus, r.w;
  r.spans_compatible = compatible(span_of(plus), span_of(minus));
  return r;
}

// ---------------------------------------------------------------------------

bool IncompatDecomposition::ok() const {
  return lambda > 0.0 && lambda < 1.0 && u_outside_q && v_outside_p && c_compatible_p && c_compatible_q &&
         meet_pc_is_u && meet_qc_is_v;
}

IncompatDecomposition incompat_decompose(const Subspace& P, const Subspace& Q, const Tolerance& tol) {
  require_same_dim(P, Q, "incompat_decompose");
  if (compatible(P, Q, tol)) throw PreconditionError("incompat_decompose: the subspaces are compatible");

  const Matrix& bp = P.basis();
  const Matrix m = bp.adjoint() * Q.projector() * bp;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const auto& values = eig.eigenvalues();

  Eigen::Index best = -1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const double l = values(k);
    if (l <= tol.eq_tol || l >= 1.0 - tol.eq_tol) continue;
    const double gap = std::abs(l - 0.5);
    if (gap < best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  if (best < 0) throw InternalError("incompat_decompose: no eigenvalue strictly between 0 and 1");

  IncompatDecomposition r;
  r.P = P;
  r.Q = Q;
  r.lambda = values(best);
  r.u = (bp * eig.eigenvectors().col(best)).normalized();
  const Vector qu = Q.project(r.u);
  r.v = qu.normalized();
  Matrix uv(P.dim(), 2);
  uv << r.u, r.v;
  r.C = span_of(uv, tol);

  r.eigen_residual = (P.project(qu) - r.lambda * r.u).norm();
  const Subspace su = Subspace::from_orthonormal(r.u);
  const Subspace sv = Subspace::from_orthonormal(r.v);
  r.u_outside_q = !leq(su, Q, tol);
  r.v_outside_p = !leq(sv, P, tol);
  r.c_compatible_p = compatible(r.C, P, tol);
  r.c_compatible_q = compatible(r.C, Q, tol);
  r.meet_pc_is_u = eq(meet(P, r.C, tol), su, tol);
  r.meet_qc_is_v = eq(meet(Q, r.C, tol), sv, tol);
  return r;
}

// ---------------------------------------------------------------------------

bool EllipseChain::ok() const {
  for (const auto& r : rounds)
    if (!r.ok()) return false;
  return reaches_bottom;
}

namespace {

// c * (cos t, sin t) + e3, embedded in C^d.
Vector polar_point(int dim, double c, double t) { return e13(dim, c * std::cos(t), c * std::sin(t)); }

Subspace ray(const Vector& v) { return Subspace::from_orthonormal(v.normalized()); }

}  // namespace

EllipseChain ellipse_chain(double a, int dim, const Tolerance& tol) {
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("ellipse_chain: a must lie in (0, 1], got " + std::to_string(a));
  if (dim < 3) throw DomainError("ellipse_chain: dimension must be at least 3");
  EllipseChain chain;
  chain.a = a;
  chain.dim = dim;

  double c = a;
  double theta = 0.0;
  while (c < kStepClamp) {
    ChainRound r;
    r.c_in = c;
    const double fc = f_step(c);
    // Local coordinates (x, y) of w in the frame where the pair is (+-c, 0, 1).
    double x = 0.0;
    double y = fc;
    if (fc >= kStepClamp) {
      // The point of the ellipse at distance 1 from the axis: the new pair is
      // then orthogonal.
      x = std::sqrt(std::max(0.0, (2.0 * c * c - 1.0) / (c * c)));
      y = std::sqrt(1.0 - c * c) / c;
    }
    r.ellipse_residual = x * x + (1.0 - c * c) * y * y - c * c;

    const Subspace u_plus = ray(polar_point(dim, c, theta));
    const Subspace u_minus = ray(polar_point(dim, -c, theta));
    const double radius = std::hypot(x, y);
    const double phi = theta + std::atan2(y, x);
    const Vector w_plus = polar_point(dim, radius, phi);
    const Vector w_minus = polar_point(dim, -radius, phi);

    auto compat_meet = [&](const Vector& w, bool& compat, bool& meets) {
      const Subspace sw = ray(w);
      const Subspace a_span = join(u_plus, sw, tol);
      const Subspace b_span = join(u_minus, sw, tol);
      compat = compatible(a_span, b_span, tol);
      meets = eq(meet(a_span, b_span, tol), sw, tol);
    };
    compat_meet(w_plus, r.compatible_plus, r.meet_plus);
    compat_meet(w_minus, r.compatible_minus, r.meet_minus);

    r.c_out = fc >= kStepClamp ? 1.0 : fc;
    chain.rounds.push_back(r);
    c = r.c_out;
    theta = phi;
  }

  const Subspace last_plus = ray(polar_point(dim, c, theta));
  const Subspace last_minus = ray(polar_point(dim, -c, theta));
  chain.reaches_bottom = compatible(last_plus, last_minus, tol) && meet(last_plus, last_minus, tol).is_bottom();
  return chain;
}

}  // namespace pqm
