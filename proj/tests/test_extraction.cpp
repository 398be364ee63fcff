#include <gtest/gtest.h>

#include <sstream>

#include "foml/extraction.hpp"
#include "foml/parser.hpp"
#include "foml/syntax.hpp"
#include "foml/testgen.hpp"

using namespace foml;

namespace {

Formula F(const char* s) { return parse_formula(s); }

Formula phi1() { return read_formula_file(std::string(FOML_TEST_DATA) + "/phi1.foml"); }

const Tableau& phi1_tableau() {
  static const Tableau t = *search(phi1()).tableau;
  return t;
}

const TableauNode* forall_node(const Tableau& t, const std::string& world) {
  const TableauNode* out = nullptr;
  for_each_node(t.root, [&](const TableauNode& n, std::size_t) {
    if (!out && n.rule == Rule::NestedForall && to_string(n.world) == world) out = &n;
  });
  return out;
}

} // namespace

TEST(Extract, Phi1InitialModel) {
  const KripkeModel m = extract_model(phi1_tableau());
  EXPECT_TRUE(validate_model(m).empty());
  EXPECT_TRUE(m.worlds.contains("r"));
  EXPECT_EQ(m.delta("r").size(), 1u);
  EXPECT_EQ(m.delta("r.0").size(), 3u);
  EXPECT_EQ(m.successors("r.0.0").size(), 6u);
  EXPECT_FALSE(check(m, "r", {}, phi1_tableau().theta));
}

TEST(Extract, SingleNodeTableau) {
  const SearchResult r = search(F("P(x)"));
  ASSERT_EQ(r.verdict, Verdict::Sat);
  const KripkeModel m = extract_model(*r.tableau);
  EXPECT_EQ(m.worlds, std::set<WorldId>{"r"});
  EXPECT_EQ(m.delta("r"), (std::set<Element>{"x", "v0"}));
  EXPECT_TRUE(m.holds("r", "P", {"x"}));
  EXPECT_FALSE(m.holds("r", "P", {"v0"}));
}

TEST(Extract, UnsaturatedRejected) {
  const Formula theta = prepare_formula(phi1());
  FreshVars fresh;
  fresh.reserve(theta);
  const Tableau t{theta, init_root(theta, fresh)};
  EXPECT_THROW(extract_model(t), TableauError);
}

TEST(Extract, LastNodeLiteralsHold) {
  const Tableau& t = phi1_tableau();
  const KripkeModel m = extract_model(t);
  for (const TableauNode* n : last_nodes(t)) {
    for (const auto& f : n->gamma) {
      if (!f.is_literal()) continue;
      Assignment id;
      for (const auto& x : free_vars(f)) id[x] = x;
      EXPECT_TRUE(check(m, to_string(n->world), id, f)) << print_formula(f);
    }
  }
}

TEST(LeafViolations, Phi1ChainEnd) {
  const Tableau& t = phi1_tableau();
  const KripkeModel m = extract_model(t);
  const auto v = find_leaf_violations(t, m);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(to_string(v.front().world), "r.0");
  const TableauNode* n = forall_node(t, "r.0");
  ASSERT_NE(n, nullptr);
  const SkolemForest& f = *n->forest.forest;
  EXPECT_EQ(v.front().leaf, f.leaves().front());
  EXPECT_EQ(v.front().depth, 2u);
  EXPECT_EQ(v.front().formula.op(), Op::Exists);
  Assignment id;
  for (const auto& x : free_vars(v.front().formula)) id[x] = x;
  EXPECT_FALSE(check(m, "r.0", id, v.front().formula));
}

TEST(LeafViolations, NoNestedForall) {
  const SearchResult r = search(F("(exists x. [] P(x)) & <> Q(a)"));
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_TRUE(find_leaf_violations(*r.tableau, extract_model(*r.tableau)).empty());
}

TEST(Extend, ChainGrowsAtTheLeaf) {
  const Tableau& t = phi1_tableau();
  const Var d2 = forall_node(t, "r.0")->forest.forest->leaves().front();
  const Extension e1 = extend_tableau(t, {"r", "0"}, d2);
  ASSERT_EQ(e1.fresh_vars.size(), 1u);
  const SkolemForest& f1 = *forall_node(e1.tableau, "r.0")->forest.forest;
  EXPECT_EQ(f1.size(), 4u);
  EXPECT_EQ(f1.kids(d2), std::vector<Var>{e1.fresh_vars[0]});
  EXPECT_TRUE(verify_tableau(e1.tableau, phi1()).empty());
  const KripkeModel m0 = extract_model(t), m1 = extract_model(e1.tableau);
  EXPECT_TRUE(extends_model(m0, m1));
  EXPECT_EQ(m1.delta("r.0").size(), 4u);

  const Extension e2 = extend_tableau(e1.tableau, {"r", "0"}, e1.fresh_vars[0]);
  EXPECT_EQ(forall_node(e2.tableau, "r.0")->forest.forest->size(), 5u);
  EXPECT_TRUE(verify_tableau(e2.tableau, phi1()).empty());
}

TEST(Extend, NonLeafRejected) {
  const Tableau& t = phi1_tableau();
  const SkolemForest& f = *forall_node(t, "r.0")->forest.forest;
  EXPECT_ANY_THROW(extend_tableau(t, {"r", "0"}, f.roots.front()));
  EXPECT_ANY_THROW(extend_tableau(t, {"r", "9"}, f.leaves().front()));
}

TEST(Iterate, Phi1NeedsTheLimit) {
  const ExtensionOutcome o0 = iterate_extensions(phi1(), phi1_tableau(), 0);
  EXPECT_EQ(o0.status, ExtensionStatus::ResidualViolations);
  EXPECT_EQ(o0.model, extract_model(phi1_tableau()));
  const ExtensionOutcome o = iterate_extensions(phi1(), phi1_tableau(), 3);
  EXPECT_EQ(o.status, ExtensionStatus::ResidualViolations);
  ASSERT_EQ(o.trace.snapshots.size(), 4u);
  for (std::size_t k = 0; k < o.trace.snapshots.size(); ++k) {
    EXPECT_EQ(o.trace.snapshots[k].delta("r.0").size(), 3 + k);
    EXPECT_TRUE(validate_model(o.trace.snapshots[k]).empty());
    if (k > 0) EXPECT_TRUE(extends_model(o.trace.snapshots[k - 1], o.trace.snapshots[k]));
  }
  EXPECT_FALSE(o.violations.empty());
  std::istringstream lines(trace_to_jsonl(o.trace));
  std::size_t n = 0;
  for (std::string l; std::getline(lines, l);) n += !l.empty();
  EXPECT_EQ(n, o.trace.snapshots.size());
}

TEST(Iterate, FiniteModelSatisfiedAtOnce) {
  const Formula f = F("<> forall x. exists y. [] P(x,y)");
  const SearchResult r = search(f);
  ASSERT_EQ(r.verdict, Verdict::Sat);
  const ExtensionOutcome o = iterate_extensions(f, *r.tableau, 0);
  EXPECT_EQ(o.status, ExtensionStatus::Satisfied);
  EXPECT_TRUE(check(o.model, "r", {}, f));
}

TEST(ExtendsModel, DetectsShrinking) {
  const KripkeModel m0 = extract_model(phi1_tableau());
  KripkeModel m1 = m0;
  m1.worlds.erase("r.0.0.0");
  EXPECT_FALSE(extends_model(m0, m1));
  EXPECT_TRUE(extends_model(m0, m0));
}

TEST(Corpus, ModelsOfCertificatesAreValid) {
  GenConfig cfg;
  cfg.max_depth = 5;
  for (const auto& f : gen_corpus(cfg, 100)) {
    const SearchResult r = search(f);
    if (r.verdict != Verdict::Sat) continue;
    const KripkeModel m = extract_model(*r.tableau);
    ASSERT_TRUE(validate_model(m).empty()) << print_formula(f);
  }
}
