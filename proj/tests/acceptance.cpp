// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion; exit status 1 if any fails.
// `acceptance --write-golden` regenerates the golden certificate instead.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "foml/components.hpp"
#include "foml/extraction.hpp"
#include "foml/parser.hpp"
#include "foml/syntax.hpp"
#include "foml/testgen.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace foml;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kData = FOML_TEST_DATA;
const std::string kPhi1 = kData + "/phi1.foml";
const std::string kGolden = std::string(FOML_GOLDEN_DIR) + "/phi1_certificate.json";

struct Verdict8 {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Run {
  int status = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  Run r;
  const std::string cmd = std::string(FOML_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const TableauNode* find_node(const TableauNode& root, const std::function<bool(const TableauNode&)>& pred) {
  const TableauNode* out = nullptr;
  for_each_node(root, [&](const TableauNode& n, std::size_t) {
    if (!out && pred(n)) out = &n;
  });
  return out;
}

// The iff instances under ∀w pick their right disjunct exactly when both arguments coincide.
std::vector<int> scripted_or(const WorldName&, const FormulaSet&, const Formula& f) {
  const Formula l = f.lhs();
  if (l.op() == Op::And && l.lhs().op() == Op::Diamond && l.lhs().body().is_pred()) {
    const auto& a = l.lhs().body().args();
    if (a.size() == 2) return a[0] == a[1] ? std::vector<int>{1, 0} : std::vector<int>{0, 1};
  }
  return {0, 1};
}

// One root: the chain of three nodes under the single atom.
std::vector<SkolemForest> scripted_forest(const WorldName&, const FormulaSet& gamma, const VarSet& s, FreshVars& fresh) {
  const auto nf = unique_nested_forall(gamma);
  if (!nf || s.size() != 1) return {};
  const auto atoms = enumerate_atoms(nf->body, nf->x);
  if (atoms.size() != 1) return {};
  SkolemForest f;
  Var prev = *s.begin();
  f.roots = {prev};
  f.label[prev] = atoms[0];
  for (int i = 0; i < 2; ++i) {
    const Var v = fresh.next();
    f.label[v] = atoms[0];
    f.parent[v] = prev;
    f.children[prev].push_back(v);
    prev = v;
  }
  return {f};
}

SearchResult replay_phi1() {
  ChoiceHooks h;
  h.or_order = scripted_or;
  h.forests = scripted_forest;
  return search(read_formula_file(kPhi1), {}, h);
}

// Reports the first path at which the two documents differ.
void compare_structure(const nlohmann::json& a, const nlohmann::json& b, const std::string& at, Verdict8& v) {
  if (a.type() != b.type()) return v.fail("type differs at " + at);
  if (a.is_object()) {
    for (const auto& [k, val] : a.items()) {
      if (!b.contains(k)) return v.fail("key " + k + " missing at " + at);
      compare_structure(val, b.at(k), at + "/" + k, v);
    }
    if (a.size() != b.size()) v.fail("key count differs at " + at);
  } else if (a.is_array()) {
    if (a.size() != b.size()) return v.fail("length differs at " + at);
    for (std::size_t i = 0; i < a.size(); ++i) compare_structure(a[i], b[i], at + "/" + std::to_string(i), v);
  } else if (a != b) {
    v.fail("value differs at " + at);
  }
}

Verdict8 criterion1() {
  Verdict8 v;
  const std::string cert = "acceptance_phi1.cert.json";
  auto t0 = Clock::now();
  const Run sat = run_cli("sat " + kPhi1 + " -o " + cert);
  const double secs = seconds_since(t0);
  if (sat.status != 0 || sat.out.find("SAT") == std::string::npos) v.fail("sat exit " + std::to_string(sat.status));
  if (secs > 60) v.fail("sat took " + std::to_string(secs) + " s");
  const Run orc = run_cli("oracle " + kPhi1 + " --max-worlds 3 --max-domain 2 --depth 3");
  if (orc.status != 1 || orc.out.find("none") == std::string::npos) v.fail("oracle exit " + std::to_string(orc.status));
  std::remove(cert.c_str());
  if (v.pass) {
    std::ostringstream d;
    d.precision(2);
    d << std::fixed << "sat in " << secs << " s, oracle (3,2,3) none";
    v.detail = d.str();
  }
  return v;
}

Verdict8 criterion2() {
  Verdict8 v;
  const SearchResult r = replay_phi1();
  if (r.verdict != foml::Verdict::Sat) {
    v.fail("replay verdict " + to_string(r.verdict));
    return v;
  }
  const Tableau& t = *r.tableau;
  if (!verify_tableau(t, read_formula_file(kPhi1)).empty()) v.fail("certificate does not verify");
  const TableauNode* u = find_node(t.root, [](const TableauNode& n) {
    return n.rule == Rule::NestedForall && to_string(n.world) == "r.0";
  });
  if (!u || u->s.size() != 3) {
    v.fail("u does not have three elements");
  } else {
    const SkolemForest& f = *u->forest.forest;
    if (f.size() != 3 || f.leaves().size() != 1 || f.depth(f.leaves().front()) != 2) v.fail("forest at u is not a 3-chain");
  }
  const KripkeModel m = extract_model(t);
  if (m.successors("r.0.0").size() != 6) v.fail("v0 has " + std::to_string(m.successors("r.0.0").size()) + " successors");
  const std::string golden = slurp(kGolden);
  if (golden.empty()) {
    v.fail("golden certificate missing");
  } else {
    compare_structure(nlohmann::json::parse(golden), nlohmann::json::parse(tableau_to_json(t)), "", v);
  }
  if (v.pass) v.detail = "|delta(u)| = 3, 3-chain forest, 6 successors at v0, matches golden";
  return v;
}

Verdict8 criterion3() {
  Verdict8 v;
  const Formula phi1 = read_formula_file(kPhi1);
  const Tableau t = *search(phi1).tableau;
  for (std::size_t k = 0; k <= 5 && v.pass; ++k) {
    const ExtensionOutcome o = iterate_extensions(phi1, t, k);
    const auto& d = o.model.delta("r.0");
    if (d.size() != 3 + k) v.fail("k=" + std::to_string(k) + ": |delta(u)| = " + std::to_string(d.size()));
    for (std::size_t i = 1; i < o.trace.snapshots.size(); ++i) {
      if (!extends_model(o.trace.snapshots[i - 1], o.trace.snapshots[i])) v.fail("snapshot " + std::to_string(i) + " not monotone");
    }
    const TableauNode* u = find_node(o.tableau.root, [](const TableauNode& n) {
      return n.rule == Rule::NestedForall && to_string(n.world) == "r.0";
    });
    if (!u || o.violations.empty()) {
      v.fail("k=" + std::to_string(k) + ": no leaf violation");
      continue;
    }
    const SkolemForest& f = *u->forest.forest;
    const auto& lv = o.violations.front();
    if (to_string(lv.world) != "r.0" || f.leaves() != std::vector<Var>{lv.leaf} || !f.kids(lv.leaf).empty()) {
      v.fail("k=" + std::to_string(k) + ": violation not at the chain end");
    }
    if (o.status != ExtensionStatus::ResidualViolations) v.fail("k=" + std::to_string(k) + ": unexpected status");
  }
  const Run cli = run_cli("--format json model " + kPhi1 + " --extensions 2");
  try {
    const auto j = nlohmann::json::parse(cli.out);
    if (j.at("model").at("delta").at("r.0").size() != 5) v.fail("cli k=2 delta(u) size");
  } catch (const std::exception& e) {
    v.fail(std::string("cli model output: ") + e.what());
  }
  if (v.pass) v.detail = "|delta(u)| = 3..8 for k = 0..5, monotone, violation at chain end";
  return v;
}

struct CorpusRun {
  DiffReport report;
  double seconds = 0;
};

CorpusRun corpus() {
  GenConfig cfg;
  cfg.seed = 1;
  cfg.max_depth = 6;
  auto t0 = Clock::now();
  CorpusRun c{differential_run(cfg, 300, OracleBounds{3, 2, 3}), 0};
  c.seconds = seconds_since(t0);
  return c;
}

Verdict8 criterion4(const CorpusRun& c) {
  Verdict8 v;
  std::size_t sat = 0;
  for (const auto& r : c.report.records) {
    if (r.tableau != foml::Verdict::Sat) continue;
    ++sat;
    if (!r.certificate_ok) v.fail("certificate of #" + std::to_string(r.index) + " rejected");
    if (!r.model_ok) v.fail("model of #" + std::to_string(r.index) + " invalid");
    if (!r.literals_ok) v.fail("literal false in model of #" + std::to_string(r.index));
  }
  if (v.pass) v.detail = std::to_string(sat) + " certificates and models valid";
  return v;
}

Verdict8 criterion5(const CorpusRun& c) {
  Verdict8 v;
  std::size_t osat = 0, resource = 0;
  for (const auto& r : c.report.records) {
    if (r.oracle == "sat") ++osat;
    if (r.tableau == foml::Verdict::ResourceExhausted) ++resource;
    if (r.oracle == "sat" && r.tableau != foml::Verdict::Sat) v.fail("#" + std::to_string(r.index) + " oracle SAT, tableau " + to_string(r.tableau));
    if (r.oracle == "resource" && r.tableau == foml::Verdict::Unsat) v.fail("#" + std::to_string(r.index) + " oracle undecided on tableau UNSAT");
  }
  if (c.seconds > 600) v.fail("corpus took " + std::to_string(c.seconds) + " s");
  if (v.pass) {
    std::ostringstream d;
    d.precision(1);
    d << std::fixed << osat << " oracle SAT all tableau SAT, " << resource << " tableau RESOURCE, " << c.seconds << " s";
    v.detail = d.str();
  }
  return v;
}

Verdict8 criterion6() {
  Verdict8 v;
  std::vector<Formula> pool;
  for (const auto& f : oracle::subformulas(to_nnf(read_formula_file(kPhi1)))) pool.push_back(f);
  std::mt19937_64 rng(41);
  std::size_t randoms = 0;
  while (randoms < 50) {
    const Formula f = to_nnf(oracle::random_formula(rng, 5));
    if (atom_closure(f).size() > 12) continue;
    pool.push_back(f);
    ++randoms;
  }
  std::size_t atoms = 0, forests = 0;
  for (const auto& root : pool) {
    for (const auto& f : oracle::subformulas(root)) {
      if (atom_closure(f).size() > 12) continue;
      if (auto e = oracle::compare_atoms(f)) v.fail(*e);
      ++atoms;
      if (f.op() != Op::Forall || !is_nested_forall(f) || atom_closure(f.body()).size() > 12) continue;
      if (!is_clean(f)) continue;
      const auto as = enumerate_atoms(f.body(), f.symbol());
      std::size_t b = 0;
      for (const auto& a : as) b = std::max(b, a.existentials().size());
      if (as.size() > 3 || b > 2) continue;
      if (auto e = oracle::compare_forests(f, 1)) v.fail(*e);
      ++forests;
    }
  }
  if (forests == 0) v.fail("no nested universal compared");
  if (v.pass) v.detail = std::to_string(atoms) + " atom sets, " + std::to_string(forests) + " forest sets agree";
  return v;
}

Verdict8 criterion7(const CorpusRun& c) {
  Verdict8 v;
  double worst = 0;
  for (const auto& r : c.report.records) {
    if (!r.bound_ok) v.fail("#" + std::to_string(r.index) + " forest of " + std::to_string(r.largest_forest) + " nodes");
    if (r.largest_forest > 0) worst = std::max(worst, r.largest_forest / r.forest_bound);
  }
  if (v.pass) {
    std::ostringstream d;
    d.precision(4);
    d << "largest size/bound ratio " << worst;
    v.detail = d.str();
  }
  return v;
}

Verdict8 criterion8() {
  Verdict8 v;
  std::mt19937_64 rng(43);
  const oracle::Signature sig;
  for (int i = 0; i < 200; ++i) {
    const KripkeModel m = oracle::random_model(rng, 1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 3));
    const Formula f = oracle::random_formula(rng, 5);
    const WorldId w = *std::next(m.worlds.begin(), static_cast<long>(rng() % m.worlds.size()));
    const std::vector<Element> d(m.delta(w).begin(), m.delta(w).end());
    Assignment s;
    for (const auto& x : sig.vars) s[x] = d[rng() % d.size()];
    if (oracle::eval(m, w, s, f) != check(m, w, s, to_nnf(f))) v.fail("NNF changes truth of " + print_formula(f));
  }
  for (int i = 0; i < 1000; ++i) {
    const Formula f = oracle::random_formula(rng, 1 + i % 7);
    if (parse_formula(print_formula(f)) != f) v.fail("round trip of " + print_formula(f));
  }
  if (v.pass) v.detail = "200 NNF pairs, 1000 round trips";
  return v;
}

} // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::string(argv[1]) == "--write-golden") {
    const SearchResult r = replay_phi1();
    if (r.verdict != foml::Verdict::Sat) return 1;
    std::ofstream(kGolden) << tableau_to_json(*r.tableau);
    std::cout << "wrote " << kGolden << "\n";
    return 0;
  }
  bool all = true;
  auto report = [&](int n, const Verdict8& v) {
    all = all && v.pass;
    std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << " (" << v.detail << ")" << std::endl;
  };
  report(1, criterion1());
  report(2, criterion2());
  report(3, criterion3());
  const CorpusRun c = corpus();
  report(4, criterion4(c));
  report(5, criterion5(c));
  report(6, criterion6());
  report(7, criterion7(c));
  report(8, criterion8());
  return all ? 0 : 1;
}
