#include <gtest/gtest.h>

#include <random>

#include "foml/components.hpp"
#include "foml/fragment.hpp"
#include "foml/parser.hpp"
#include "foml/syntax.hpp"
#include "oracles.hpp"

using namespace foml;

namespace {

Formula F(const char* s) { return parse_formula(s); }

Formula phi1() { return read_formula_file(std::string(FOML_TEST_DATA) + "/phi1.foml"); }

// The nested universal under the leading diamond.
Formula psi1() { return to_nnf(phi1()).body(); }

Assignment assign_all(const KripkeModel& m, const WorldId& w, std::mt19937_64& rng, const VarSet& vars) {
  const std::vector<Element> d(m.delta(w).begin(), m.delta(w).end());
  std::uniform_int_distribution<std::size_t> pick(0, d.size() - 1);
  Assignment s;
  for (const auto& v : vars) s[v] = d[pick(rng)];
  return s;
}

} // namespace

TEST(Nnf, DeMorgan) { EXPECT_EQ(to_nnf(F("~(P(x) & Q(x))")), F("~P(x) | ~Q(x)")); }

TEST(Nnf, ModalDuality) { EXPECT_EQ(to_nnf(F("~[] P(x)")), F("<> ~P(x)")); }

TEST(Nnf, QuantifiedBundleDual) { EXPECT_EQ(to_nnf(F("~exists x. [] P(x)")), F("forall x. <> ~P(x)")); }

TEST(Nnf, ImplicationsEliminated) {
  EXPECT_EQ(to_nnf(F("P(x) -> Q(x)")), F("~P(x) | Q(x)"));
  EXPECT_EQ(to_nnf(F("P(x) <-> Q(x)")), F("P(x) & Q(x) | ~P(x) & ~Q(x)"));
}

TEST(Nnf, IdempotentAndNnf) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const Formula f = oracle::random_formula(rng, 5);
    const Formula n = to_nnf(f);
    ASSERT_TRUE(is_nnf(n)) << print_formula(f);
    ASSERT_EQ(to_nnf(n), n) << print_formula(f);
    ASSERT_EQ(complement(n), oracle::negate_nnf(n)) << print_formula(f);
  }
}

TEST(Nnf, PreservesTruthOnRandomModels) {
  std::mt19937_64 rng(11);
  const oracle::Signature sig;
  int compared = 0;
  for (int i = 0; i < 300; ++i) {
    const KripkeModel m = oracle::random_model(rng, 1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 3));
    ASSERT_TRUE(validate_model(m).empty());
    const Formula f = oracle::random_formula(rng, 5);
    for (const auto& w : m.worlds) {
      const Assignment s = assign_all(m, w, rng, {sig.vars.begin(), sig.vars.end()});
      const bool want = oracle::eval(m, w, s, f);
      ASSERT_EQ(oracle::eval(m, w, s, to_nnf(f)), want) << print_formula(f);
      ASSERT_EQ(check(m, w, s, to_nnf(f)), want) << print_formula(f) << " at " << w;
      ++compared;
    }
  }
  EXPECT_GE(compared, 200);
}

TEST(Nnf, ArityClashIsReportedWithPredicate) {
  const Formula bad = Formula::conj(Formula::pred("P", {"x"}), Formula::pred("P", {"x", "y"}));
  try {
    collect_arity(bad);
    FAIL() << "no error";
  } catch (const FormulaError& e) {
    EXPECT_NE(std::string(e.what()).find('P'), std::string::npos);
  }
}

TEST(CleanRename, SecondBinderRenamed) {
  EXPECT_EQ(clean_rename(F("(exists x. [] P(x)) | (forall x. <> Q(x))"), {}),
            F("(exists x. [] P(x)) | (forall v0. <> Q(v0))"));
}

TEST(CleanRename, BinderClashingWithFreeVariable) {
  EXPECT_EQ(clean_rename(F("P(x) & [] exists x. Q(x)"), {}), F("P(x) & [] exists v0. Q(v0)"));
}

TEST(CleanRename, CleanFormulaUnchanged) {
  const Formula f = F("exists x. [] (P(x) & forall y. <> Q(x,y))");
  EXPECT_TRUE(is_clean(f));
  EXPECT_EQ(clean_rename(f, {"z", "w"}), f);
}

TEST(CleanRename, ForbiddenNamesAvoided) {
  const Formula g = clean_rename(F("exists x. [] P(x)"), {"x"});
  EXPECT_EQ(g, F("exists v0. [] P(v0)"));
}

TEST(CleanRename, RandomFormulasBecomeClean) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const Formula f = to_nnf(oracle::random_formula(rng, 5));
    const Formula g = clean_rename(f, {});
    ASSERT_TRUE(is_clean(g)) << print_formula(f);
    ASSERT_EQ(free_vars(g), free_vars(f));
    ASSERT_EQ(oracle::naive_free_vars(g), free_vars(g));
  }
}

TEST(Substitute, AvoidsCapture) {
  const Formula f = substitute(F("exists y. P(x,y)"), "x", "y");
  EXPECT_EQ(free_vars(f), VarSet{"y"});
  EXPECT_TRUE(alpha_equivalent(f, F("exists z. P(y,z)")));
}

TEST(FreeVars, Examples) {
  EXPECT_TRUE(free_vars(F("forall x. (P(x) | <> exists y. Q(x,y))")).empty());
  EXPECT_EQ(free_vars(psi1().body()), VarSet{"x"});
}

TEST(Components, Module) { EXPECT_EQ(components(F("P(x)")), FormulaSet{F("P(x)")}); }

TEST(Components, QuantifiedUnfolds) {
  EXPECT_EQ(components(F("P(x) & exists y. [] Q(y)")), (FormulaSet{F("P(x)"), F("exists y. [] Q(y)"), F("[] Q(y)")}));
}

TEST(Components, MixedConnectives) {
  const Formula f = F("((exists y. [] P(y)) | <> Q(x)) & forall z. <> P(z)");
  EXPECT_EQ(components(f), (FormulaSet{F("exists y. [] P(y)"), F("[] P(y)"), F("<> Q(x)"), F("forall z. <> P(z)"),
                                       F("<> P(z)")}));
  EXPECT_EQ(components(f), oracle::naive_components(f));
}

TEST(Components, ModuleAndLiteralPredicates) {
  EXPECT_TRUE(F("P(x,y)").is_module());
  EXPECT_TRUE(F("P(x,y)").is_literal());
  EXPECT_TRUE(F("[] forall x. P(x)").is_module());
  EXPECT_FALSE(F("[] forall x. P(x)").is_literal());
  EXPECT_FALSE(F("P(x) & Q(x)").is_module());
  EXPECT_FALSE(F("P(x) & Q(x)").is_literal());
}

TEST(OuterExVars, Examples) {
  EXPECT_EQ(outer_ex_vars(F("(exists x. [] P(x)) & forall y. <> Q(y)")), VarSet{"x"});
  EXPECT_TRUE(outer_ex_vars(F("[] P(x)")).empty());
  EXPECT_EQ(outer_ex_vars(F("exists x. [] exists y. [] R(x,y)")), VarSet{"x"});
}

TEST(OuterExVars, AgreesWithNaiveOnRandomFormulas) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const Formula f = to_nnf(oracle::random_formula(rng, 6));
    ASSERT_EQ(outer_ex_vars(f), oracle::naive_outer_ex_vars(f)) << print_formula(f);
    ASSERT_EQ(components(f), oracle::naive_components(f)) << print_formula(f);
  }
}

TEST(NestedForall, Examples) {
  const Formula p1 = psi1();
  ASSERT_EQ(p1.op(), Op::Forall);
  EXPECT_TRUE(is_nested_forall(p1));
  const Formula p8 = F("forall w. ((<> P(x,w) <-> [] P(x,w)) & <> forall z. ((P(x,w) & P(w,z)) -> P(x,z)))");
  EXPECT_FALSE(is_nested_forall(to_nnf(p8)));
  EXPECT_FALSE(is_nested_forall(F("forall x. [] P(x)")));
  EXPECT_THROW(is_nested_forall(F("exists x. [] P(x)")), FormulaError);
}

TEST(Atoms, TwoChoicesOfDisjunct) {
  const Formula psi = F("((exists y. [] P(x,y,u)) | <> Q(x,u)) & forall z. <> R(x,z)");
  const auto atoms = enumerate_atoms(psi, "x");
  ASSERT_EQ(atoms.size(), 2u);
  EXPECT_TRUE(atoms[0].contains(F("exists y. [] P(x,y,u)")));
  EXPECT_TRUE(atoms[1].contains(F("<> Q(x,u)")));
  for (const auto& a : atoms) EXPECT_TRUE(a.contains(F("forall z. <> R(x,z)")));
  EXPECT_EQ(oracle::compare_atoms(psi), std::nullopt);
}

TEST(Atoms, ConjunctionHasOneAtom) {
  const auto atoms = enumerate_atoms(psi1().body(), "x");
  ASSERT_EQ(atoms.size(), 1u);
  EXPECT_EQ(atoms[0].existentials().size(), 1u);
}

TEST(Atoms, LiteralHasOneAtom) {
  const auto atoms = enumerate_atoms(F("P(x)"), "x");
  ASSERT_EQ(atoms.size(), 1u);
  EXPECT_EQ(atoms[0].members, FormulaSet{F("P(x)")});
}

TEST(Atoms, InconsistentBodyHasNone) { EXPECT_TRUE(enumerate_atoms(F("P(x) & ~P(x)"), "x").empty()); }

TEST(Atoms, AgreeWithBruteForceOnSubformulas) {
  for (const auto& f : oracle::subformulas(to_nnf(phi1()))) {
    if (atom_closure(f).size() > 12) continue;
    ASSERT_EQ(oracle::compare_atoms(f), std::nullopt);
  }
  std::mt19937_64 rng(17);
  int checked = 0;
  while (checked < 50) {
    const Formula f = to_nnf(oracle::random_formula(rng, 5));
    if (atom_closure(f).size() > 12) continue;
    ASSERT_EQ(oracle::compare_atoms(f), std::nullopt);
    ++checked;
  }
}

TEST(Classify, Phi1IsEbbe) { EXPECT_EQ(classify_fragment(phi1()).category, FragmentCategory::EBBE); }

TEST(Classify, ForallBoxWithExistsBoxIsFmp) {
  const auto c = classify_fragment(F("(forall x. [] P(x)) & exists y. [] Q(y)"));
  EXPECT_EQ(c.category, FragmentCategory::FmpDecidable);
  EXPECT_TRUE(c.bundles_present.contains(Bundle::ForallBox));
}

TEST(Classify, DiamondForallAloneIsEbbe) {
  const auto c = classify_fragment(F("<> forall x. P(x)"));
  EXPECT_EQ(c.category, FragmentCategory::EBBE);
  EXPECT_EQ(c.bundles_present, std::set<Bundle>{Bundle::BoxExists});
}

TEST(Classify, BareQuantifierIsNotBundled) {
  EXPECT_EQ(classify_fragment(F("forall x. P(x)")).category, FragmentCategory::NotBundled);
}

TEST(Classify, CategoryTable) {
  EXPECT_EQ(categorize({Bundle::ExistsBox, Bundle::BoxExists}), FragmentCategory::EBBE);
  EXPECT_EQ(categorize({}), FragmentCategory::EBBE);
}
