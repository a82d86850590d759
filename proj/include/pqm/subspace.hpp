#pragma once

// Subspaces of C^d with the ortholattice operations, the Sasaki projection
// and its adjoint hook, compatibility tests and unitary images.
//
// A Subspace stores an orthonormal basis as the columns of a d x r matrix.
// Bases are not canonical, so equality is always semantic (mutual
// containment within Tolerance::eq_tol).

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pqm {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

struct Tolerance {
  /// Singular values at or below rank_tol * max(1, sigma_max) are discarded.
  double rank_tol = 1e-10;
  /// Residual threshold for containment and equality tests.
  double eq_tol = 1e-8;

  /// Throws DomainError unless 0 < rank_tol <= eq_tol < 1.
  void validate() const;
};

class Subspace {
 public:
  /// The zero subspace of C^d.
  static Subspace bottom(int dim);
  /// C^d itself.
  static Subspace top(int dim);
  /// Wraps columns that are already orthonormal. No orthonormalization is
  /// done; use span_of for arbitrary vectors.
  static Subspace from_orthonormal(Matrix basis);

  int dim() const noexcept { return static_cast<int>(basis_.rows()); }
  int rank() const noexcept { return static_cast<int>(basis_.cols()); }
  bool is_bottom() const noexcept { return rank() == 0; }
  bool is_top() const noexcept { return rank() == dim(); }
  bool is_ray() const noexcept { return rank() == 1; }

  /// d x r matrix with orthonormal columns.
  const Matrix& basis() const noexcept { return basis_; }
  /// Orthogonal projector B B^H.
  Matrix projector() const;
  /// Orthogonal projection of v onto this subspace.
  Vector project(const Vector& v) const;

 private:
  explicit Subspace(Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
};

class UnitaryOp {
 public:
  /// Throws NotUnitary if max |U^H U - I| >= 1e-8, DomainError if not square.
  explicit UnitaryOp(Matrix entries);
  static UnitaryOp identity(int dim);

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const noexcept { return entries_; }
  /// U^{-1} = U^H.
  UnitaryOp inverse() const;

  /// Max-norm of U^H U - I.
  static double unitarity_defect(const Matrix& m);
  static constexpr double kUnitarityTol = 1e-8;

 private:
  struct Trusted {};
  UnitaryOp(Matrix entries, Trusted) : entries_(std::move(entries)) {}
  Matrix entries_;
};

/// Span of the columns of `vectors` (d x n, n may be 0). Rank is the number of
/// singular values above rank_tol * max(1, sigma_max).
Subspace span_of(const Matrix& vectors, const Tolerance& tol = {});
/// Span of a list of d-vectors. Throws DimensionMismatch if a length differs.
Subspace span_of(std::span<const Vector> vectors, int dim, const Tolerance& tol = {});

Subspace ortho(const Subspace& p);
Subspace join(const Subspace& p, const Subspace& q, const Tolerance& tol = {});
/// Intersection, computed as ortho(join(ortho p, ortho q)).
Subspace meet(const Subspace& p, const Subspace& q, const Tolerance& tol = {});
Subspace meet_all(std::span<const Subspace> ps, int dim, const Tolerance& tol = {});

/// Largest residual |v - Pi_q v| over the basis vectors v of p.
double containment_residual(const Subspace& p, const Subspace& q);
bool leq(const Subspace& p, const Subspace& q, const Tolerance& tol = {});
bool eq(const Subspace& p, const Subspace& q, const Tolerance& tol = {});

/// p & q: image of p under the orthogonal projector onto q.
Subspace sasaki_and(const Subspace& p, const Subspace& q, const Tolerance& tol = {});
/// p & q in lattice form: q meet (q^perp join p). Agrees with sasaki_and.
Subspace sasaki_and_lattice(const Subspace& p, const Subspace& q, const Tolerance& tol = {});
/// p hook q = q^perp join (p meet q); right adjoint of (. & q).
Subspace sasaki_hook(const Subspace& p, const Subspace& q, const Tolerance& tol = {});

/// p == (q meet p) join (q^perp meet p).
bool compatible(const Subspace& p, const Subspace& q, const Tolerance& tol = {});
/// Max-norm of the commutator of the two orthogonal projectors.
double projector_commutator_norm(const Subspace& p, const Subspace& q);
bool projectors_commute(const Subspace& p, const Subspace& q, const Tolerance& tol = {});

Subspace apply_unitary(const UnitaryOp& u, const Subspace& p, const Tolerance& tol = {});

/// A ray inside p that is contained in none of `avoid`. Returns nullopt only
/// if p is bottom or some member of `avoid` contains p. The result is
/// re-verified before it is returned; failure of that check throws
/// InternalError.
std::optional<Subspace> ray_in_avoiding(const Subspace& p, std::span<const Subspace> avoid,
                                        std::uint64_t seed = 0, const Tolerance& tol = {});

/// Throws DimensionMismatch unless a.dim() == b.dim().
void require_same_dim(const Subspace& a, const Subspace& b, const char* where);

/// Largest absolute entry.
double max_abs(const Matrix& m);

}  // namespace pqm
