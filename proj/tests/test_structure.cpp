#include <gtest/gtest.h>

#include <string>

#include <json.hpp>

#include "oracle_util.hpp"
#include "pqm/sampling.hpp"
#include "pqm/structure.hpp"

using namespace pqm;
using namespace pqm::testing;
using nlohmann::json;

namespace {

// All eight coordinate subspaces of C^3, as an image structure.
ImageStructure coordinate_structure() {
  const auto sat = saturate({span1(unit(3, 0)), span2(unit(3, 0), unit(3, 1))}, {}, 3);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < sat.elements.size(); ++i) names.push_back("c" + std::to_string(i));
  return make_image_structure(3, names, sat.elements, {}, sat.elements);
}

json rel(const char* element, const char* symbol) { return json::array({element, symbol}); }

json small_document() {
  return json{{"dim", 2},
              {"domain", {"a", "b"}},
              {"subspaces", {{"p", {{1, 0}}}}},
              {"projectors", {{"p", {{"a", "a"}, {"b", "a"}}}}},
              {"relation", json::array({rel("a", "top"), rel("b", "top"), rel("a", "p")})}};
}

std::vector<StructureDiagnostic> diagnostics_of(const json& doc) {
  try {
    load_structure(doc.dump());
  } catch (const StructureError& e) {
    return e.diagnostics();
  }
  ADD_FAILURE() << "structure loaded without error";
  return {};
}

bool mentions(const std::vector<StructureDiagnostic>& ds, const std::string& path, const std::string& text) {
  for (const auto& d : ds)
    if (d.path == path && d.message.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Saturate, CoordinateLatticeIsClosed) {
  const auto sat = saturate({span1(unit(3, 0)), span2(unit(3, 0), unit(3, 1))}, {}, 3);
  EXPECT_TRUE(sat.closed);
  EXPECT_EQ(sat.elements.size(), 8u);
  EXPECT_EQ(sat.growth.front(), 4u);
  EXPECT_EQ(sat.growth.back(), 8u);
}

TEST(Saturate, GenericRaysInThreeDimensionsClose) {
  // top, bot, the two rays, their complements, their join and its complement,
  // and the two rays of the join orthogonal to the seeds with their complements.
  Rng rng(1);
  const auto sat = saturate({random_ray(3, rng), random_ray(3, rng)}, {}, 3);
  EXPECT_TRUE(sat.closed);
  EXPECT_EQ(sat.elements.size(), 12u);
}

TEST(Saturate, GenericTripleHitsTheCap) {
  Rng rng(1);
  const auto sat = saturate({random_ray(4, rng), random_ray(4, rng), random_subspace(4, 2, rng)}, {}, 4, 40);
  EXPECT_FALSE(sat.closed);
  EXPECT_GT(sat.elements.size(), 40u);
  EXPECT_LE(sat.elements.size(), 41u);
  for (std::size_t i = 1; i < sat.growth.size(); ++i) EXPECT_GT(sat.growth[i], sat.growth[i - 1]);
}

TEST(Structure, LoadSmallDocument) {
  const FiniteStructure s = load_structure(small_document().dump());
  EXPECT_EQ(s.dim, 2);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.symbols, (std::vector<std::string>{"top", "bot", "p"}));
  const auto p = *s.symbol_index("p");
  EXPECT_TRUE(s.holds(*s.element_index("a"), p));
  EXPECT_FALSE(s.holds(*s.element_index("b"), p));
  ASSERT_TRUE(s.projectors[p].has_value());
  EXPECT_FALSE(s.projectors[s.top()].has_value());
}

TEST(Structure, DumpLoadRoundTrip) {
  Rng rng(2);
  ImageStructureOptions opts;
  opts.duplicates = 3;
  const auto image = generate_image_structure(opts, rng);
  const FiniteStructure& s = image.structure;
  const FiniteStructure back = load_structure(dump_structure(s));
  EXPECT_EQ(back.dim, s.dim);
  EXPECT_EQ(back.domain, s.domain);
  ASSERT_EQ(back.fragment_size(), s.fragment_size());
  for (std::size_t p = 0; p < s.fragment_size(); ++p) {
    const auto q = back.symbol_index(s.symbols[p]);
    ASSERT_TRUE(q.has_value()) << s.symbols[p];
    EXPECT_TRUE(ref_eq(back.values[*q], s.values[p])) << s.symbols[p];
    for (std::size_t m = 0; m < s.size(); ++m) {
      EXPECT_EQ(back.holds(m, *q), s.holds(m, p));
      if (s.projectors[p]) {
        EXPECT_EQ((*back.projectors[*q])[m], (*s.projectors[p])[m]);
      }
    }
  }
  // A second pass is a fixed point of the loader's symbol ordering.
  EXPECT_EQ(load_structure(dump_structure(back)).symbols, back.symbols);
}

TEST(Structure, MissingTableRow) {
  json doc = small_document();
  doc["projectors"]["p"].erase("b");
  const auto ds = diagnostics_of(doc);
  EXPECT_TRUE(mentions(ds, "/projectors/p", "not total")) << ds.size();
}

TEST(Structure, UnknownSymbolInRelation) {
  json doc = small_document();
  doc["relation"].push_back(rel("a", "q"));
  EXPECT_TRUE(mentions(diagnostics_of(doc), "/relation/3/1", "unknown subspace symbol 'q'"));
}

TEST(Structure, AllErrorsAreReported) {
  json doc = small_document();
  doc["relation"].push_back(rel("zz", "top"));
  doc["subspaces"]["r"] = {{1, 0, 0}};
  doc["projectors"]["p"]["b"] = "nowhere";
  doc["extra"] = true;
  const auto ds = diagnostics_of(doc);
  EXPECT_GE(ds.size(), 4u);
  EXPECT_TRUE(mentions(ds, "/relation/3/0", "unknown element 'zz'"));
  EXPECT_TRUE(mentions(ds, "/subspaces/r/0", "expected 2"));
  EXPECT_TRUE(mentions(ds, "/projectors/p/b", "unknown element 'nowhere'"));
  EXPECT_TRUE(mentions(ds, "/extra", "unknown key"));

  doc = small_document();
  doc["schema"] = 2;
  EXPECT_TRUE(mentions(diagnostics_of(doc), "/schema", "unsupported schema version"));
}

TEST(Structure, RejectsBadUnitaryAndDocuments) {
  json doc = small_document();
  doc["unitaries"]["U"] = {{"matrix", {{1, 1}, {0, 1}}}, {"table", {{"a", "a"}, {"b", "b"}}}};
  EXPECT_TRUE(mentions(diagnostics_of(doc), "/unitaries/U/matrix", "not unitary"));
  EXPECT_THROW(load_structure("[1, 2]"), StructureError);
  EXPECT_THROW(load_structure("{\"dim\": 0, \"domain\": []}"), StructureError);
  EXPECT_THROW(load_structure("{ not json"), Error);
}

TEST(Structure, ImageStructurePassesEverything) {
  const auto image = coordinate_structure();
  const auto& s = image.structure;
  const SuiteReport axioms = check_structure_axioms(s);
  EXPECT_TRUE(axioms.passed());
  for (const auto& r : axioms.results) EXPECT_EQ(r.skipped, 0u) << r.name;
  const SuiteReport morphism = check_strong_morphism(s);
  EXPECT_TRUE(morphism.passed());
  for (std::size_t m = 0; m < s.size(); ++m) {
    const KappaResult k = kappa_of(s, m);
    ASSERT_TRUE(k.has_least());
    EXPECT_TRUE(ref_eq(k.meet, image.element_values[m]));
    const FilterReport f = filter_of(s, m);
    EXPECT_TRUE(f.ok());
    for (std::size_t p = 0; p < s.fragment_size(); ++p) {
      const bool member = std::find(f.members.begin(), f.members.end(), p) != f.members.end();
      EXPECT_EQ(member, ref_leq(image.element_values[m], s.values[p]));
    }
  }
  EXPECT_EQ(check_characterization(s).status(), "agree");
}

TEST(Structure, GeneratedCorpusAgrees) {
  Rng rng(3);
  for (int i = 0; i < 6; ++i) {
    ImageStructureOptions opts;
    opts.bases = uniform_int(rng, 1, 3);
    opts.duplicates = uniform_int(rng, 0, 5);
    opts.unitaries = uniform_int(rng, 0, 2);
    const auto image = generate_image_structure(opts, rng);
    EXPECT_EQ(image.structure.fragment_size(), static_cast<std::size_t>(4 + 4 * opts.bases));
    const Characterization c = check_characterization(image.structure);
    EXPECT_TRUE(c.axioms_pass);
    EXPECT_TRUE(c.morphism_pass);
    EXPECT_EQ(c.skipped_instances, 0u);
    EXPECT_EQ(c.status(), "agree");
  }
}

TEST(Structure, RaysOnlyDomainIsStillAModel) {
  Rng rng(4);
  ImageStructureOptions opts;
  opts.rays_only = true;
  const auto image = generate_image_structure(opts, rng);
  for (const auto& v : image.element_values) EXPECT_LE(v.rank(), 1);
  const Characterization c = check_characterization(image.structure);
  EXPECT_TRUE(c.axioms_pass);
  EXPECT_TRUE(c.morphism_pass);
  const auto* coverage = c.morphism.find("ray-coverage");
  ASSERT_NE(coverage, nullptr);
  EXPECT_FALSE(coverage->asserted);
  EXPECT_EQ(coverage->violations, 0u);
}

TEST(Structure, EmptyDomainViolatesNegatedBottom) {
  const FiniteStructure s = load_structure(R"({"dim": 3, "domain": []})");
  const SuiteReport r = check_structure_axioms(s);
  EXPECT_FALSE(r.passed());
  ASSERT_NE(r.find("neg-bot"), nullptr);
  EXPECT_GT(r.find("neg-bot")->violations, 0u);
  EXPECT_FALSE(check_strong_morphism(s).passed());
}

TEST(Structure, AllBottomStructureIsDegenerate) {
  json doc{{"dim", 3},
           {"domain", {"a", "b"}},
           {"subspaces", {{"p", {{1, 0, 0}}}}},
           {"relation", json::array()}};
  for (const char* m : {"a", "b"})
    for (const char* p : {"top", "bot", "p"}) doc["relation"].push_back(rel(m, p));
  const FiniteStructure s = load_structure(doc.dump());
  for (std::size_t m = 0; m < s.size(); ++m) EXPECT_TRUE(kappa_of(s, m).meet.is_bottom());
  const SuiteReport morphism = check_strong_morphism(s);
  ASSERT_NE(morphism.find("nontrivial-image"), nullptr);
  EXPECT_GT(morphism.find("nontrivial-image")->violations, 0u);
  EXPECT_GT(check_structure_axioms(s).find("neg-bot")->violations, 0u);
  EXPECT_EQ(check_characterization(s).status(), "agree");
}

TEST(Structure, ElementRelatedOnlyToTop) {
  json doc{{"dim", 3},
           {"domain", {"a"}},
           {"subspaces", {{"p", {{1, 0, 0}}}}},
           {"relation", json::array({rel("a", "top")})}};
  const FiniteStructure s = load_structure(doc.dump());
  const KappaResult k = kappa_of(s, 0);
  ASSERT_TRUE(k.has_least());
  EXPECT_TRUE(k.meet.is_top());
  EXPECT_EQ(*k.least, s.top());
}

TEST(Structure, FilterFlagsTwoRaysWithoutBottom) {
  json doc{{"dim", 3},
           {"domain", {"a"}},
           {"subspaces", {{"e1", {{1, 0, 0}}}, {"e2", {{0, 1, 0}}}}},
           {"relation", json::array({rel("a", "top"), rel("a", "e1"), rel("a", "e2")})}};
  const FiniteStructure s = load_structure(doc.dump());
  const FilterReport f = filter_of(s, 0);
  EXPECT_TRUE(f.contains_top);
  EXPECT_TRUE(f.two_rays_without_bottom);
  EXPECT_FALSE(f.ok());
  EXPECT_THROW(filter_of(s, 5), PreconditionError);
}

TEST(Structure, IncompatibleMinimalPairHasNoLeast) {
  const double c = 1.0 / std::sqrt(2.0);
  json doc{{"dim", 3},
           {"domain", {"a", "z"}},
           {"subspaces", {{"u", {{1, 0, 0}}}, {"v", {{c, c, 0}}}}},
           {"relation", json::array({rel("a", "top"), rel("a", "u"), rel("a", "v"), rel("z", "top"), rel("z", "u"), rel("z", "v"),
                                    rel("z", "bot")})}};
  const FiniteStructure s = load_structure(doc.dump());
  const KappaResult k = kappa_of(s, 0);
  EXPECT_FALSE(k.has_least());
  ASSERT_TRUE(k.minimal_pair.has_value());
  const auto [p, q] = *k.minimal_pair;
  EXPECT_FALSE(compatible(s.values[p], s.values[q]));
  EXPECT_FALSE(filter_of(s, 0).incompatible_minimal_pairs.empty());
  EXPECT_FALSE(check_structure_axioms(s).passed());
  EXPECT_FALSE(check_strong_morphism(s).passed());
}

TEST(Structure, CorruptedRelationIsCaughtBothWays) {
  auto image = coordinate_structure();
  auto& s = image.structure;
  // A ray element stops verifying a plane that contains it.
  std::optional<std::pair<std::size_t, std::size_t>> target;
  for (std::size_t m = 0; m < s.size() && !target; ++m)
    for (std::size_t p = 0; p < s.fragment_size() && !target; ++p)
      if (image.element_values[m].rank() == 1 && s.values[p].rank() == 2 && s.holds(m, p)) target = {m, p};
  ASSERT_TRUE(target.has_value());
  s.relation[target->first][target->second] = 0;
  const Characterization c = check_characterization(s);
  EXPECT_FALSE(c.axioms_pass);
  EXPECT_FALSE(c.morphism_pass);
  EXPECT_GT(c.morphism.find("relation")->violations, 0u);
  EXPECT_GT(c.axioms.find("leq")->violations, 0u);
}

TEST(Structure, InjectedFaultsFailBothChecks) {
  Rng rng(5);
  for (FaultKind kind : {FaultKind::RemoveRelation, FaultKind::AddRelation, FaultKind::RedirectProjector}) {
    for (int i = 0; i < 3; ++i) {
      ImageStructureOptions opts;
      opts.duplicates = 2;
      const auto image = generate_image_structure(opts, rng);
      const Mutant mutant = inject_fault(image, kind, rng);
      EXPECT_FALSE(mutant.description.empty());
      const Characterization c = check_characterization(mutant.structure);
      EXPECT_FALSE(c.axioms_pass) << to_string(kind) << ": " << mutant.description;
      EXPECT_FALSE(c.morphism_pass) << to_string(kind) << ": " << mutant.description;
      EXPECT_EQ(c.status(), "agree");
    }
  }
}

TEST(Structure, PassingStructuresSatisfyFilterLaws) {
  Rng rng(6);
  for (int i = 0; i < 4; ++i) {
    ImageStructureOptions opts;
    opts.bases = 2;
    opts.duplicates = 2;
    const auto image = generate_image_structure(opts, rng);
    const auto& s = image.structure;
    ASSERT_TRUE(check_structure_axioms(s).passed());
    int rich = 0;
    for (std::size_t m = 0; m < s.size(); ++m) {
      const FilterReport f = filter_of(s, m);
      EXPECT_TRUE(f.ok());
      int rays = 0;
      for (auto p : f.members) rays += s.values[p].is_ray();
      if (rays >= 2) {
        ++rich;
        EXPECT_TRUE(s.holds(m, s.bot()));
      }
      EXPECT_TRUE(kappa_of(s, m).has_least());
    }
    EXPECT_GT(rich, 0);
  }
}
