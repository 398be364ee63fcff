#include <gtest/gtest.h>

#include <random>

#include "foml/kripke.hpp"
#include "foml/oracle.hpp"
#include "foml/parser.hpp"
#include "foml/syntax.hpp"
#include "oracles.hpp"

using namespace foml;

namespace {

KripkeModel one_world() {
  KripkeModel m;
  m.worlds = {"w"};
  m.domain = {"a"};
  m.local_domain["w"] = {"a"};
  m.valuation["w"]["P"] = {{"a"}};
  return m;
}

Formula F(const char* s) { return parse_formula(s); }

} // namespace

TEST(Validate, SingleWorld) { EXPECT_TRUE(validate_model(one_world()).empty()); }

TEST(Validate, MonotonicityViolation) {
  KripkeModel m;
  m.worlds = {"w", "v"};
  m.domain = {"a", "b"};
  m.edges = {{"w", "v"}};
  m.local_domain["w"] = {"a", "b"};
  m.local_domain["v"] = {"a"};
  EXPECT_FALSE(validate_model(m).empty());
}

TEST(Validate, OtherInvariants) {
  KripkeModel m = one_world();
  m.local_domain["w"] = {};
  EXPECT_FALSE(validate_model(m).empty());
  m = one_world();
  m.edges = {{"w", "ghost"}};
  EXPECT_FALSE(validate_model(m).empty());
  m = one_world();
  m.valuation["w"]["P"] = {{"b"}};
  EXPECT_FALSE(validate_model(m).empty());
  m = one_world();
  m.valuation["w"]["Q"] = {{"a"}, {"a", "a"}};
  EXPECT_FALSE(validate_model(m).empty());
}

TEST(Check, AtomicTruth) {
  const KripkeModel m = one_world();
  EXPECT_TRUE(check(m, "w", {{"x", "a"}}, F("P(x)")));
  EXPECT_FALSE(check(m, "w", {{"x", "a"}}, F("~P(x)")));
  EXPECT_TRUE(check(m, "w", {}, F("[] Q")));
  EXPECT_FALSE(check(m, "w", {}, F("<> Q | exists y. ~P(y) & P(y)")));
}

TEST(Check, IrrelevantAssignmentNamesVariable) {
  const KripkeModel m = one_world();
  try {
    check(m, "w", {{"x", "zz"}}, F("P(x)"));
    FAIL() << "no error";
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find('x'), std::string::npos);
  }
  EXPECT_THROW(check(m, "w", {}, F("P(x)")), ModelError);
}

TEST(Check, QuantifiersUseLocalDomain) {
  KripkeModel m;
  m.worlds = {"w", "v"};
  m.domain = {"a", "b"};
  m.edges = {{"w", "v"}};
  m.local_domain["w"] = {"a"};
  m.local_domain["v"] = {"a", "b"};
  m.valuation["v"]["P"] = {{"a"}};
  EXPECT_TRUE(check(m, "w", {}, F("forall x. [] P(x)")));
  EXPECT_FALSE(check(m, "w", {}, F("[] forall x. P(x)")));
  EXPECT_TRUE(check(m, "w", {}, F("<> exists x. ~P(x)")));
}

TEST(Check, AgreesWithReferenceSemantics) {
  std::mt19937_64 rng(29);
  const oracle::Signature sig;
  for (int i = 0; i < 500; ++i) {
    const KripkeModel m = oracle::random_model(rng, 1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 3));
    const Formula f = oracle::random_formula(rng, 5);
    for (const auto& w : m.worlds) {
      const std::vector<Element> d(m.delta(w).begin(), m.delta(w).end());
      Assignment s;
      for (const auto& v : sig.vars) s[v] = d[rng() % d.size()];
      ASSERT_EQ(check(m, w, s, f), oracle::eval(m, w, s, f)) << print_formula(f) << " at " << w;
    }
  }
}

TEST(ModelJson, RoundTripIsCanonical) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    const KripkeModel m = oracle::random_model(rng, 3, 3);
    const std::string j = model_to_json(m);
    const KripkeModel back = model_from_json(j);
    EXPECT_EQ(model_to_json(back), j);
    EXPECT_EQ(back.worlds, m.worlds);
    EXPECT_EQ(back.edges, m.edges);
    EXPECT_EQ(back.local_domain, m.local_domain);
  }
}

TEST(ModelJson, MalformedRejected) { EXPECT_THROW(model_from_json("{\"worlds\": 3}"), std::exception); }

TEST(Oracle, FindsSmallModel) {
  const Formula f = F("<> forall x. exists y. [] P(x,y)");
  const auto r = bounded_model_search(f, {2, 1, 2});
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(validate_model(r->model).empty());
  EXPECT_TRUE(check(r->model, r->world, r->sigma, f));
  EXPECT_LE(r->model.worlds.size(), 2u);
}

TEST(Oracle, ContradictionHasNoModel) {
  for (int w = 1; w <= 3; ++w) EXPECT_FALSE(bounded_model_search(F("P(x) & ~P(x)"), {w, 2, 2}).has_value());
}

TEST(Oracle, Phi1HasNoSmallModel) {
  const Formula phi1 = to_nnf(read_formula_file(std::string(FOML_TEST_DATA) + "/phi1.foml"));
  EXPECT_FALSE(bounded_model_search(phi1, {3, 2, 3}).has_value());
}

TEST(Oracle, ResourceCapRaises) {
  OracleBounds b{3, 3, 2};
  b.max_candidates = 1;
  EXPECT_THROW(bounded_model_search(F("<> forall x. exists y. [] P(x,y)"), b), OracleResourceError);
}

TEST(Oracle, ModelsAreGenuine) {
  std::mt19937_64 rng(37);
  int found = 0;
  for (int i = 0; i < 100; ++i) {
    const Formula f = to_nnf(oracle::random_formula(rng, 4));
    std::optional<OracleModel> r;
    try {
      r = bounded_model_search(f, {2, 2, 1});
    } catch (const OracleResourceError&) {
      continue;
    }
    if (!r) continue;
    ++found;
    ASSERT_TRUE(validate_model(r->model).empty());
    ASSERT_TRUE(oracle::eval(r->model, r->world, r->sigma, f)) << print_formula(f);
  }
  EXPECT_GT(found, 10);
}
