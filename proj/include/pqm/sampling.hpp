#pragma once

// Seeded random generators for subspaces and unitaries. Every generator takes
// the engine explicitly so that suites are reproducible from a single seed.

#include <random>
#include <utility>

#include "pqm/subspace.hpp"

namespace pqm {

using Rng = std::mt19937_64;

/// Complex Gaussian vector (i.i.d. standard normal real and imaginary parts).
Vector random_vector(int dim, Rng& rng);
Subspace random_ray(int dim, Rng& rng);
/// Haar-distributed subspace of the given rank (0 <= rank <= dim).
Subspace random_subspace(int dim, int rank, Rng& rng);
/// Rank drawn uniformly from [0, dim].
Subspace random_subspace(int dim, Rng& rng);
/// Random subspace of p with the given rank (clamped to p.rank()).
Subspace random_subspace_within(const Subspace& p, int rank, Rng& rng);
/// Random subspace of p with rank uniform in [0, p.rank()].
Subspace random_subspace_within(const Subspace& p, Rng& rng);
/// Random ray inside p, or bottom when p is bottom.
Subspace random_ray_within(const Subspace& p, Rng& rng);
/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
UnitaryOp random_unitary(int dim, Rng& rng);
/// Two subspaces spanned by subsets of a common random orthonormal basis; such
/// pairs always have commuting projectors.
std::pair<Subspace, Subspace> random_compatible_pair(int dim, Rng& rng);

int uniform_int(Rng& rng, int lo, int hi);
bool coin(Rng& rng, double p_true = 0.5);

}  // namespace pqm
