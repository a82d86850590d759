#include "pqm/sampling.hpp"

#include <algorithm>
#include <vector>

namespace pqm {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool coin(Rng& rng, double p_true) { return std::bernoulli_distribution(p_true)(rng); }

Vector random_vector(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v;
}

namespace {

Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

}  // namespace

Subspace random_ray(int dim, Rng& rng) {
  Vector v = random_vector(dim, rng);
  return Subspace::from_orthonormal(Matrix(v / v.norm()));
}

Subspace random_subspace(int dim, int rank, Rng& rng) {
  rank = std::clamp(rank, 0, dim);
  if (rank == 0) return Subspace::bottom(dim);
  if (rank == dim) return Subspace::top(dim);
  return span_of(gaussian_matrix(dim, rank, rng));
}

Subspace random_subspace(int dim, Rng& rng) { return random_subspace(dim, uniform_int(rng, 0, dim), rng); }

Subspace random_subspace_within(const Subspace& p, int rank, Rng& rng) {
  rank = std::clamp(rank, 0, p.rank());
  if (rank == 0) return Subspace::bottom(p.dim());
  if (rank == p.rank()) return p;
  return span_of(Matrix(p.basis() * gaussian_matrix(p.rank(), rank, rng)));
}

Subspace random_subspace_within(const Subspace& p, Rng& rng) {
  return random_subspace_within(p, uniform_int(rng, 0, p.rank()), rng);
}

Subspace random_ray_within(const Subspace& p, Rng& rng) { return random_subspace_within(p, 1, rng); }

UnitaryOp random_unitary(int dim, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(dim, dim, rng));
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(j) *= diag / mag;
  }
  return UnitaryOp(q);
}

std::pair<Subspace, Subspace> random_compatible_pair(int dim, Rng& rng) {
  const Matrix w = random_unitary(dim, rng).matrix();
  std::vector<int> pcols;
  std::vector<int> qcols;
  for (int j = 0; j < dim; ++j) {
    if (coin(rng)) pcols.push_back(j);
    if (coin(rng)) qcols.push_back(j);
  }
  auto pick = [&](const std::vector<int>& cols) {
    Matrix b(dim, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) b.col(static_cast<Eigen::Index>(k)) = w.col(cols[k]);
    return Subspace::from_orthonormal(std::move(b));
  };
  return {pick(pcols), pick(qcols)};
}

}  // namespace pqm
