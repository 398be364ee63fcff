#include <gtest/gtest.h>

#include "foml/components.hpp"
#include "foml/fragment.hpp"
#include "foml/parser.hpp"
#include "foml/syntax.hpp"
#include "foml/testgen.hpp"
#include "oracles.hpp"

using namespace foml;

TEST(Generator, DepthOneIsAModule) {
  GenConfig cfg;
  cfg.max_depth = 1;
  for (std::uint64_t s = 1; s <= 50; ++s) {
    cfg.seed = s;
    EXPECT_TRUE(gen_formula(cfg).is_module());
  }
}

TEST(Generator, OutputsAreCleanEbbeNnf) {
  GenConfig cfg;
  cfg.max_depth = 6;
  for (const auto& f : gen_corpus(cfg, 500)) {
    ASSERT_TRUE(is_nnf(f)) << print_formula(f);
    ASSERT_TRUE(is_clean(f)) << print_formula(f);
    ASSERT_EQ(classify_fragment(f).category, FragmentCategory::EBBE) << print_formula(f);
    ASSERT_EQ(parse_formula(print_formula(f)), f);
  }
}

TEST(Generator, Deterministic) {
  GenConfig cfg;
  cfg.seed = 99;
  EXPECT_EQ(gen_corpus(cfg, 20), gen_corpus(cfg, 20));
  GenConfig other = cfg;
  other.seed = 100;
  EXPECT_NE(gen_corpus(cfg, 20), gen_corpus(other, 20));
}

TEST(Generator, ProducesNestedUniversals) {
  GenConfig cfg;
  std::size_t nested = 0;
  for (std::uint64_t s = 1; s <= 1000; ++s) {
    cfg.seed = s;
    for (const auto& g : oracle::subformulas(gen_formula(cfg))) {
      if (g.op() == Op::Forall && is_nested_forall(g)) {
        ++nested;
        break;
      }
    }
  }
  EXPECT_GE(nested, 1u);
}

TEST(Generator, BadConfigRejected) {
  GenConfig cfg;
  cfg.max_depth = 0;
  EXPECT_THROW(gen_formula(cfg), std::invalid_argument);
  cfg = {};
  cfg.weights[0] = 0;
  EXPECT_THROW(gen_formula(cfg), std::invalid_argument);
}

TEST(Differential, EmptyRun) {
  const DiffReport r = differential_run({}, 0, {});
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.discrepancies(), 0u);
  EXPECT_EQ(to_jsonl(r), "");
}

TEST(Differential, SmallCorpusAgrees) {
  GenConfig cfg;
  cfg.seed = 4;
  cfg.max_depth = 5;
  const DiffReport r = differential_run(cfg, 60, {2, 2, 2});
  ASSERT_EQ(r.records.size(), 60u);
  for (const auto& d : r.records) EXPECT_TRUE(d.issues.empty()) << d.formula << ": " << d.issues.front();
  EXPECT_EQ(r.discrepancies(), 0u);
}

TEST(Differential, KnownVerdictsOnBothSides) {
  const Formula unsat = parse_formula("P(x) & ~P(x)");
  EXPECT_EQ(search(unsat).verdict, Verdict::Unsat);
  EXPECT_FALSE(bounded_model_search(unsat, {3, 2, 3}).has_value());
  const Formula sat = parse_formula("<> forall x. exists y. [] P(x,y)");
  EXPECT_EQ(search(sat).verdict, Verdict::Sat);
  const auto m = bounded_model_search(sat, {3, 2, 3});
  ASSERT_TRUE(m.has_value());
  EXPECT_LE(m->model.worlds.size(), 2u);
}

TEST(Differential, ReportLinesPerRecord) {
  GenConfig cfg;
  const DiffReport r = differential_run(cfg, 5, {2, 1, 2}, std::nullopt, 2);
  const std::string j = to_jsonl(r);
  EXPECT_EQ(static_cast<std::size_t>(std::count(j.begin(), j.end(), '\n')), 5u);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    EXPECT_EQ(r.records[i].index, i);
    EXPECT_EQ(r.records[i].seed, corpus_seed(cfg.seed, i));
  }
}
