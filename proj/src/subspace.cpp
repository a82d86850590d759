#include "pqm/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "pqm/error.hpp"

namespace pqm {

void Tolerance::validate() const {
  if (!(rank_tol > 0.0 && rank_tol <= eq_tol && eq_tol < 1.0)) {
    throw DomainError("tolerance: require 0 < rank_tol <= eq_tol < 1");
  }
}

Subspace Subspace::bottom(int dim) {
  if (dim <= 0) throw DomainError("subspace: dimension must be positive");
  return Subspace(Matrix(dim, 0));
}

Subspace Subspace::top(int dim) {
  if (dim <= 0) throw DomainError("subspace: dimension must be positive");
  return Subspace(Matrix::Identity(dim, dim));
}

Subspace Subspace::from_orthonormal(Matrix basis) {
  if (basis.rows() <= 0) throw DomainError("subspace: dimension must be positive");
  if (basis.cols() > basis.rows()) throw DomainError("subspace: more basis vectors than dimension");
  return Subspace(std::move(basis));
}

Matrix Subspace::projector() const { return basis_ * basis_.adjoint(); }

Vector Subspace::project(const Vector& v) const { return basis_ * (basis_.adjoint() * v); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double UnitaryOp::unitarity_defect(const Matrix& m) {
  const Matrix gram = m.adjoint() * m;
  return max_abs(gram - Matrix::Identity(m.rows(), m.cols()));
}

UnitaryOp::UnitaryOp(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() <= 0 || entries_.rows() != entries_.cols()) {
    throw DomainError("unitary: matrix must be square and non-empty");
  }
  const double defect = unitarity_defect(entries_);
  if (!(defect < kUnitarityTol)) throw NotUnitary(defect, "unitary");
}

UnitaryOp UnitaryOp::identity(int dim) { return UnitaryOp(Matrix::Identity(dim, dim), Trusted{}); }

UnitaryOp UnitaryOp::inverse() const { return UnitaryOp(entries_.adjoint(), Trusted{}); }

void require_same_dim(const Subspace& a, const Subspace& b, const char* where) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim(), where);
}

Subspace span_of(const Matrix& vectors, const Tolerance& tol) {
  const auto d = static_cast<int>(vectors.rows());
  if (vectors.cols() == 0) return Subspace::bottom(d);
  Eigen::JacobiSVD<Matrix> svd(vectors, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  const double threshold = tol.rank_tol * std::max(1.0, sigma.size() ? sigma(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > threshold) ++rank;
  return Subspace::from_orthonormal(svd.matrixU().leftCols(rank));
}

Subspace span_of(std::span<const Vector> vectors, int dim, const Tolerance& tol) {
  if (dim <= 0) throw DomainError("span_of: dimension must be positive");
  Matrix stacked(dim, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != dim) {
      throw DimensionMismatch(dim, static_cast<int>(vectors[i].size()), "span_of");
    }
    stacked.col(static_cast<Eigen::Index>(i)) = vectors[i];
  }
  return span_of(stacked, tol);
}

Subspace ortho(const Subspace& p) {
  const int d = p.dim();
  const int r = p.rank();
  if (r == 0) return Subspace::top(d);
  if (r == d) return Subspace::bottom(d);
  // The first r Householder vectors span p; the remaining columns of Q are
  // an orthonormal basis of the complement.
  Eigen::HouseholderQR<Matrix> qr(p.basis());
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return Subspace::from_orthonormal(q.rightCols(d - r));
}

Subspace join(const Subspace& p, const Subspace& q, const Tolerance& tol) {
  require_same_dim(p, q, "join");
  if (p.is_bottom()) return q;
  if (q.is_bottom()) return p;
  Matrix stacked(p.dim(), p.rank() + q.rank());
  stacked << p.basis(), q.basis();
  return span_of(stacked, tol);
}

Subspace meet(const Subspace& p, const Subspace& q, const Tolerance& tol) {
  require_same_dim(p, q, "meet");
  if (p.is_top()) return q;
  if (q.is_top()) return p;
  return ortho(join(ortho(p), ortho(q), tol));
}

Subspace meet_all(std::span<const Subspace> ps, int dim, const Tolerance& tol) {
  Subspace acc = Subspace::top(dim);
  for (const auto& p : ps) acc = meet(acc, p, tol);
  return acc;
}

double containment_residual(const Subspace& p, const Subspace& q) {
  require_same_dim(p, q, "leq");
  if (p.is_bottom()) return 0.0;
  const Matrix residual = p.basis() - q.basis() * (q.basis().adjoint() * p.basis());
  return residual.colwise().norm().maxCoeff();
}

bool leq(const Subspace& p, const Subspace& q, const Tolerance& tol) {
  return containment_residual(p, q) < tol.eq_tol;
}

bool eq(const Subspace& p, const Subspace& q, const Tolerance& tol) {
  return p.rank() == q.rank() && leq(p, q, tol) && leq(q, p, tol);
}

Subspace sasaki_and(const Subspace& p, const Subspace& q, const Tolerance& tol) {
  require_same_dim(p, q, "sasaki_and");
  if (p.is_bottom() || q.is_bottom()) return Subspace::bottom(p.dim());
  return span_of(Matrix(q.basis() * (q.basis().adjoint() * p.basis())), tol);
}

Subspace sasaki_and_lattice(const Subspace& p, const Subspace& q, const Tolerance& tol) {
  require_same_dim(p, q, "sasaki_and_lattice");
  return meet(q, join(ortho(q), p, tol), tol);
}

Subspace sasaki_hook(const Subspace& p, const Subspace& q, const Tolerance& tol) {
  require_same_dim(p, q, "sasaki_hook");
  return join(ortho(q), meet(p, q, tol), tol);
}

bool compatible(const Subspace& p, const Subspace& q, const Tolerance& tol) {
  require_same_dim(p, q, "compatible");
  return eq(p, join(meet(q, p, tol), meet(ortho(q), p, tol), tol), tol);
}

double projector_commutator_norm(const Subspace& p, const Subspace& q) {
  require_same_dim(p, q, "compatible");
  const Matrix pp = p.projector();
  const Matrix pq = q.projector();
  return max_abs(pp * pq - pq * pp);
}

bool projectors_commute(const Subspace& p, const Subspace& q, const Tolerance& tol) {
  return projector_commutator_norm(p, q) < tol.eq_tol;
}

Subspace apply_unitary(const UnitaryOp& u, const Subspace& p, const Tolerance& tol) {
  if (u.dim() != p.dim()) throw DimensionMismatch(p.dim(), u.dim(), "apply_unitary");
  if (p.is_bottom()) return p;
  return span_of(Matrix(u.matrix() * p.basis()), tol);
}

namespace {

bool avoids_all(const Subspace& ray, std::span<const Subspace> avoid, const Tolerance& tol) {
  return std::none_of(avoid.begin(), avoid.end(),
                      [&](const Subspace& q) { return leq(ray, q, tol); });
}

Subspace normalized_ray(const Vector& v) {
  Matrix column = v / v.norm();
  return Subspace::from_orthonormal(std::move(column));
}

}  // namespace

std::optional<Subspace> ray_in_avoiding(const Subspace& p, std::span<const Subspace> avoid,
                                        std::uint64_t seed, const Tolerance& tol) {
  for (const auto& q : avoid) require_same_dim(p, q, "ray_in_avoiding");
  if (p.is_bottom()) return std::nullopt;
  for (const auto& q : avoid) {
    if (leq(p, q, tol)) return std::nullopt;
  }
  const int r = p.rank();
  if (r == 1) {
    if (!avoids_all(p, avoid, tol)) throw InternalError("ray_in_avoiding: rank-1 self-check failed");
    return p;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  constexpr int kRandomAttempts = 64;
  for (int attempt = 0; attempt < kRandomAttempts; ++attempt) {
    Vector coeffs(r);
    for (int k = 0; k < r; ++k) coeffs(k) = Complex(gauss(rng), gauss(rng));
    Subspace ray = normalized_ray(p.basis() * coeffs);
    if (avoids_all(ray, avoid, tol)) return ray;
  }

  // u(t) = sum_k t^k b_k lies in a given q for at most r - 1 values of t unless
  // p <= q, so |avoid| * (r - 1) + 1 distinct t values always suffice. A few
  // extra values absorb tolerance effects near a root.
  const std::size_t budget = avoid.size() * static_cast<std::size_t>(r - 1) + 1 + 64;
  for (std::size_t i = 0; i < budget; ++i) {
    const double t = 1.0 + static_cast<double>(i) / static_cast<double>(budget);
    Vector coeffs(r);
    double power = 1.0;
    for (int k = 0; k < r; ++k) {
      coeffs(k) = power;
      power *= t;
    }
    Subspace ray = normalized_ray(p.basis() * coeffs);
    if (avoids_all(ray, avoid, tol)) return ray;
  }
  throw InternalError("ray_in_avoiding: deterministic sweep exhausted");
}

}  // namespace pqm
