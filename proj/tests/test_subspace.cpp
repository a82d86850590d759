#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracle_util.hpp"
#include "pqm/error.hpp"
#include "pqm/sampling.hpp"
#include "pqm/subspace.hpp"

using namespace pqm;
using namespace pqm::testing;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Vector vec(std::initializer_list<Complex> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (auto x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST(Subspace, SpanOfCollapsesDependentAndEmpty) {
  EXPECT_EQ(span1(unit(3, 0)).rank(), 1);
  std::vector<Vector> dep = {vec({1, 0, 0}), vec({2, 0, 0})};
  EXPECT_EQ(span_of(dep, 3).rank(), 1);
  std::vector<Vector> none;
  EXPECT_TRUE(span_of(none, 3).is_bottom());
  std::vector<Vector> with_zero = {vec({0, 0, 0}), vec({0, 1, 0})};
  EXPECT_EQ(span_of(with_zero, 3).rank(), 1);
}

TEST(Subspace, SpanOfRejectsWrongLength) {
  std::vector<Vector> bad = {vec({1, 0})};
  EXPECT_THROW(span_of(bad, 3), DimensionMismatch);
}

TEST(Subspace, BasisIsOrthonormal) {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    Matrix raw = Matrix::Random(4, 3);
    const Subspace s = span_of(raw);
    const Matrix g = s.basis().adjoint() * s.basis();
    EXPECT_LT(max_abs(g - Matrix::Identity(s.rank(), s.rank())), 1e-12);
  }
}

TEST(Subspace, OrthoExamples) {
  EXPECT_TRUE(ortho(Subspace::top(3)).is_bottom());
  const Subspace p = ortho(span1(unit(3, 0)));
  EXPECT_TRUE(ref_eq(p, span2(unit(3, 1), unit(3, 2))));
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Subspace r = random_subspace(4, rng);
    EXPECT_EQ(ortho(r).rank(), 4 - r.rank());
    EXPECT_TRUE(eq(ortho(ortho(r)), r));
  }
}

TEST(Subspace, MeetJoinExamples) {
  const Subspace a = span2(unit(3, 0), unit(3, 1));
  const Subspace b = span2(unit(3, 1), unit(3, 2));
  const Subspace m = meet(a, b);
  EXPECT_EQ(m.rank(), 1);
  EXPECT_TRUE(ref_eq(m, span_of(ref_intersection_basis({a, b}, 3))));
  EXPECT_TRUE(eq(m, span1(unit(3, 1))));

  Rng rng(5);
  const Subspace p = random_subspace(3, 2, rng);
  EXPECT_TRUE(eq(join(p, Subspace::bottom(3)), p));
  EXPECT_TRUE(eq(meet(p, Subspace::top(3)), p));
}

TEST(Subspace, MeetMatchesNullspaceOracle) {
  Rng rng(17);
  for (int d = 2; d <= 5; ++d) {
    for (int i = 0; i < 200; ++i) {
      const Subspace p = random_subspace(d, rng);
      const Subspace q = random_subspace(d, rng);
      const Subspace m = meet(p, q);
      EXPECT_EQ(m.rank(), ref_intersection_rank({p, q}, d));
      EXPECT_TRUE(ref_eq(m, span_of(ref_intersection_basis({p, q}, d))));
    }
  }
}

TEST(Subspace, MeetOfNestedPairsOfSharedLine) {
  // Two planes in C^3 sharing a random line: the oracle intersection is that line.
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const Vector l = random_vector(3, rng);
    const Subspace p = span2(l, random_vector(3, rng));
    const Subspace q = span2(l, random_vector(3, rng));
    const Subspace m = meet(p, q);
    ASSERT_EQ(m.rank(), 1);
    EXPECT_LT(principal_distance(m, span1(l)), 1e-9);
  }
}

TEST(Subspace, LeqExamples) {
  Rng rng(7);
  const Subspace q = random_subspace(3, rng);
  EXPECT_TRUE(leq(Subspace::bottom(3), q));
  EXPECT_TRUE(leq(span1(unit(3, 0)), span2(unit(3, 0), unit(3, 1))));
  const Subspace diag = span1(vec({1, 1, 0}));
  EXPECT_FALSE(leq(diag, span1(unit(3, 0))));
  EXPECT_NEAR(containment_residual(diag, span1(unit(3, 0))), kInvSqrt2, 1e-12);
}

TEST(Subspace, LeqMatchesRankOracle) {
  Rng rng(29);
  for (int d = 2; d <= 5; ++d) {
    for (int i = 0; i < 200; ++i) {
      const Subspace q = random_subspace(d, rng);
      const Subspace p = coin(rng) ? random_subspace_within(q, rng) : random_subspace(d, rng);
      EXPECT_EQ(leq(p, q), ref_leq(p, q));
    }
  }
}

TEST(Subspace, DimensionMismatchIsReported) {
  const Subspace a = Subspace::top(2);
  const Subspace b = Subspace::top(3);
  EXPECT_THROW(meet(a, b), DimensionMismatch);
  EXPECT_THROW(join(a, b), DimensionMismatch);
  EXPECT_THROW(leq(a, b), DimensionMismatch);
  EXPECT_THROW(sasaki_and(a, b), DimensionMismatch);
  EXPECT_THROW(sasaki_hook(a, b), DimensionMismatch);
  EXPECT_THROW(compatible(a, b), DimensionMismatch);
  EXPECT_THROW(apply_unitary(UnitaryOp::identity(2), b), DimensionMismatch);
}

TEST(Subspace, SasakiAndExamples) {
  Rng rng(31);
  const Subspace q = random_subspace(4, 3, rng);
  const Subspace p = random_subspace_within(q, 2, rng);
  EXPECT_TRUE(eq(sasaki_and(p, q), p));
  const Subspace perp = random_subspace_within(ortho(q), rng);
  EXPECT_TRUE(sasaki_and(perp, q).is_bottom());

  const Subspace diag = span1(vec({kInvSqrt2, kInvSqrt2}));
  const Subspace e1 = span1(unit(2, 0));
  EXPECT_LT(principal_distance(sasaki_and(diag, e1), e1), 1e-12);
}

TEST(Subspace, SasakiImageMatchesProjectedBasis) {
  Rng rng(37);
  for (int d = 2; d <= 5; ++d) {
    for (int i = 0; i < 100; ++i) {
      const Subspace p = random_subspace(d, rng);
      const Subspace q = random_subspace(d, rng);
      const Subspace ref = span_of(Matrix(q.projector() * p.basis()));
      EXPECT_TRUE(ref_eq(sasaki_and(p, q), ref));
      EXPECT_TRUE(eq(sasaki_and(p, q), sasaki_and_lattice(p, q)));
    }
  }
}

TEST(Subspace, SasakiHookExamples) {
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const Subspace q = random_subspace(3, rng);
    EXPECT_TRUE(eq(sasaki_hook(Subspace::bottom(3), q), ortho(q)));
    EXPECT_TRUE(sasaki_hook(Subspace::top(3), q).is_top());
  }
}

TEST(Subspace, SasakiAdjunction) {
  Rng rng(43);
  int both_true = 0;
  for (int i = 0; i < 1000; ++i) {
    const Subspace q = random_subspace(3, rng);
    const Subspace p = random_subspace(3, rng);
    // Bias x into the hook half of the time so that both outcomes occur.
    const Subspace x = coin(rng) ? random_subspace_within(sasaki_hook(p, q), rng) : random_subspace(3, rng);
    const bool lhs = leq(sasaki_and(x, q), p);
    const bool rhs = leq(x, sasaki_hook(p, q));
    EXPECT_EQ(lhs, rhs);
    both_true += lhs && rhs;
  }
  EXPECT_GT(both_true, 100);
}

TEST(Subspace, CompatibilityExamples) {
  Rng rng(47);
  const Subspace p = random_subspace(3, rng);
  EXPECT_TRUE(compatible(p, Subspace::top(3)));
  EXPECT_TRUE(compatible(random_subspace_within(p, rng), p));
  const Subspace e1 = span1(unit(2, 0));
  const Subspace diag = span1(vec({kInvSqrt2, kInvSqrt2}));
  EXPECT_FALSE(compatible(e1, diag));
  EXPECT_NEAR(projector_commutator_norm(e1, diag), 0.5, 1e-12);
}

TEST(Subspace, CompatibilityCriteriaAgree) {
  Rng rng(53);
  int compatible_count = 0;
  for (int d = 2; d <= 5; ++d) {
    for (int i = 0; i < 200; ++i) {
      auto [p, q] = coin(rng) ? random_compatible_pair(d, rng)
                              : std::pair{random_subspace(d, rng), random_subspace(d, rng)};
      const bool a = compatible(p, q);
      EXPECT_EQ(a, projectors_commute(p, q));
      compatible_count += a;
    }
  }
  EXPECT_GT(compatible_count, 300);
}

TEST(Subspace, OrtholatticeLaws) {
  Rng rng(59);
  for (int d = 2; d <= 5; ++d) {
    for (int i = 0; i < 100; ++i) {
      const Subspace p = random_subspace(d, rng);
      const Subspace q = random_subspace(d, rng);
      const Subspace r = random_subspace(d, rng);
      EXPECT_TRUE(eq(ortho(meet(p, q)), join(ortho(p), ortho(q))));
      EXPECT_TRUE(eq(meet(p, q), meet(q, p)));
      EXPECT_TRUE(eq(join(p, q), join(q, p)));
      EXPECT_TRUE(eq(meet(meet(p, q), r), meet(p, meet(q, r))));
      EXPECT_TRUE(eq(join(join(p, q), r), join(p, join(q, r))));
      EXPECT_TRUE(eq(meet(p, join(p, q)), p));
      EXPECT_TRUE(eq(join(p, meet(p, q)), p));
      const Subspace lo = random_subspace_within(q, rng);
      EXPECT_TRUE(eq(q, join(lo, meet(q, ortho(lo)))));
    }
  }
}

TEST(Subspace, UnitaryImagesAreLatticeAutomorphisms) {
  Rng rng(61);
  for (int d = 2; d <= 5; ++d) {
    const UnitaryOp u = random_unitary(d, rng);
    EXPECT_TRUE(apply_unitary(UnitaryOp::identity(d), random_subspace(d, rng)).rank() >= 0);
    EXPECT_TRUE(apply_unitary(u, Subspace::top(d)).is_top());
    for (int i = 0; i < 50; ++i) {
      const Subspace p = random_subspace(d, rng);
      const Subspace q = random_subspace(d, rng);
      EXPECT_TRUE(eq(apply_unitary(UnitaryOp::identity(d), p), p));
      EXPECT_EQ(apply_unitary(u, p).rank(), p.rank());
      EXPECT_EQ(leq(p, q), leq(apply_unitary(u, p), apply_unitary(u, q)));
      EXPECT_TRUE(eq(apply_unitary(u, meet(p, q)), meet(apply_unitary(u, p), apply_unitary(u, q))));
      EXPECT_TRUE(eq(apply_unitary(u, join(p, q)), join(apply_unitary(u, p), apply_unitary(u, q))));
      EXPECT_TRUE(eq(apply_unitary(u, ortho(p)), ortho(apply_unitary(u, p))));
      EXPECT_TRUE(eq(apply_unitary(u.inverse(), apply_unitary(u, p)), p));
    }
  }
}

TEST(Subspace, HadamardOnFirstQubit) {
  Matrix h = Matrix::Zero(4, 4);
  h(0, 0) = h(0, 2) = h(1, 1) = h(1, 3) = h(2, 0) = h(3, 1) = kInvSqrt2;
  h(2, 2) = h(3, 3) = -kInvSqrt2;
  const UnitaryOp hi(h);
  const Subspace out = apply_unitary(hi, span1(unit(4, 0)));
  EXPECT_LT(principal_distance(out, span1(vec({kInvSqrt2, 0, kInvSqrt2, 0}))), 1e-12);
}

TEST(Subspace, NonUnitaryRejected) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = 0.1;
  try {
    UnitaryOp u(m);
    FAIL() << "expected NotUnitary";
  } catch (const NotUnitary& e) {
    EXPECT_GT(e.deviation(), 0.05);
  }
  EXPECT_THROW(UnitaryOp(Matrix::Identity(2, 3)), DomainError);
}

TEST(Subspace, RayInAvoidingExamples) {
  const Subspace e2 = span1(unit(3, 1));
  auto r = ray_in_avoiding(e2, {});
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(eq(*r, e2));

  const std::vector<Subspace> plane = {span2(unit(3, 0), unit(3, 1))};
  r = ray_in_avoiding(Subspace::top(3), plane);
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(r->is_ray());
  EXPECT_GT(std::abs(r->basis()(2, 0)), 1e-6);
  EXPECT_GT(containment_residual(*r, plane[0]), 1e-6);

  const std::vector<Subspace> cover = {span2(unit(3, 1), unit(3, 2))};
  EXPECT_FALSE(ray_in_avoiding(e2, cover).has_value());
  EXPECT_FALSE(ray_in_avoiding(Subspace::bottom(3), {}).has_value());
}

TEST(Subspace, RayInAvoidingRandom) {
  Rng rng(67);
  for (int i = 0; i < 300; ++i) {
    const int d = uniform_int(rng, 2, 5);
    const Subspace p = random_subspace(d, uniform_int(rng, 1, d), rng);
    std::vector<Subspace> avoid;
    const int n = uniform_int(rng, 0, 4);
    for (int k = 0; k < n; ++k) {
      Subspace q = random_subspace(d, uniform_int(rng, 0, d - 1), rng);
      if (!leq(p, q)) avoid.push_back(q);
    }
    const auto r = ray_in_avoiding(p, avoid, static_cast<std::uint64_t>(i));
    ASSERT_TRUE(r.has_value());
    EXPECT_TRUE(ref_leq(*r, p));
    for (const auto& q : avoid) EXPECT_FALSE(ref_leq(*r, q));
  }
}

TEST(Subspace, RayInAvoidingManyPlanesThroughRay) {
  // Many hyperplanes of a 2-dimensional p: sampling must dodge all of them.
  Rng rng(71);
  const Subspace p = random_subspace(3, 2, rng);
  std::vector<Subspace> avoid;
  for (int k = 0; k < 40; ++k) avoid.push_back(join(random_ray_within(p, rng), random_ray(3, rng)));
  const auto r = ray_in_avoiding(p, avoid, 9);
  ASSERT_TRUE(r.has_value());
  for (const auto& q : avoid) EXPECT_FALSE(leq(*r, q));
}

TEST(Subspace, ToleranceValidation) {
  EXPECT_NO_THROW(Tolerance{}.validate());
  EXPECT_THROW((Tolerance{1e-6, 1e-8}.validate()), DomainError);
  EXPECT_THROW((Tolerance{0.0, 1e-8}.validate()), DomainError);
  EXPECT_THROW((Tolerance{1e-10, 1.0}.validate()), DomainError);
}
