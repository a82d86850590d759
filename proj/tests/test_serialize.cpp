#include <gtest/gtest.h>

#include "oracle_util.hpp"
#include "pqm/decider.hpp"
#include "pqm/sampling.hpp"
#include "pqm/serialize.hpp"

using namespace pqm;
using namespace pqm::testing;

TEST(Serialize, SubspaceRoundTrip) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const Subspace p = random_subspace(uniform_int(rng, 1, 5), rng);
    const Json j = to_json(p);
    EXPECT_EQ(j["rank"].get<int>(), p.rank());
    EXPECT_EQ(j["dim"].get<int>(), p.dim());
    const Subspace back = subspace_from_json(Json::parse(j.dump()));
    EXPECT_TRUE(ref_eq(back, p));
  }
}

TEST(Serialize, CanonicalBasisIgnoresRepresentation) {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const Subspace p = random_subspace(4, 2, rng);
    // The same subspace with a rotated basis.
    const UnitaryOp mix = random_unitary(2, rng);
    const Subspace q = Subspace::from_orthonormal(p.basis() * mix.matrix());
    EXPECT_LT(max_abs(canonical_basis(p) - canonical_basis(q)), 1e-10);
  }
}

TEST(Serialize, TextForm) {
  EXPECT_EQ(to_text(Subspace::bottom(3)), "bot");
  EXPECT_EQ(to_text(Subspace::top(3)), "top");
  EXPECT_EQ(to_text(span1(unit(3, 1))), "span{(0, 1, 0)}");
  Vector v(2);
  v << Complex(1, 1), Complex(0, 0);
  EXPECT_EQ(to_text(span1(v)), "span{(1, 0)}");
}

TEST(Serialize, VerdictShape) {
  BasicSentence b;
  b.negatives.push_back(Subspace::bottom(3));
  const Verdict v = decide_basic(b, 3);
  const Json j = to_json(v, true);
  EXPECT_TRUE(j["truth"].get<bool>());
  EXPECT_EQ(j["witness"]["rank"].get<int>(), 1);
  ASSERT_EQ(j["leaves"].size(), 1u);
  EXPECT_FALSE(to_json(v, false).contains("leaves"));
  const Json doc = document(j);
  EXPECT_EQ(doc["schema"].get<int>(), kSchemaVersion);
}

TEST(Serialize, DeterministicDump) {
  const SuiteReport a = check_axiom_suite(3, 50, 9);
  const SuiteReport b = check_axiom_suite(3, 50, 9);
  EXPECT_EQ(document(to_json(a)).dump(), document(to_json(b)).dump());
  const std::string text = to_text(a);
  EXPECT_NE(text.find("passed"), std::string::npos);
}

TEST(Serialize, RejectsMalformedSubspace) {
  EXPECT_THROW(subspace_from_json(Json::parse(R"({"dim": 2, "basis": [[1, 0, 0]]})")), DimensionMismatch);
  EXPECT_THROW(subspace_from_json(Json::parse(R"({"basis": []})")), DomainError);
  EXPECT_THROW(subspace_from_json(Json::parse(R"({"dim": 2, "basis": [["a", 0]]})")), DomainError);
}
