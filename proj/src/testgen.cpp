#include "foml/testgen.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <random>
#include <stdexcept>
#include <thread>

#include "foml/extraction.hpp"
#include "foml/parser.hpp"
#include "json.hpp"

namespace foml {

namespace {

class Generator {
public:
  explicit Generator(const GenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    if (cfg.max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
    if (cfg.max_predicates < 1 || cfg.max_arity < 0) throw std::invalid_argument("bad signature bounds");
    for (double w : cfg.weights) {
      if (w < 0) throw std::invalid_argument("negative production weight");
    }
    if (cfg.weights[0] <= 0) throw std::invalid_argument("literal weight must be positive");
    std::uniform_int_distribution<int> ar(cfg.max_arity > 0 ? 1 : 0, cfg.max_arity);
    for (int i = 0; i < cfg.max_predicates; ++i) arity_.push_back(ar(rng_));
  }

  Formula run() { return gen(cfg_.max_depth, true); }

private:
  Formula gen(int depth, bool top = false) {
    if (depth <= 1) return literal();
    auto w = cfg_.weights;
    if (top && std::any_of(w.begin() + 1, w.end(), [](double x) { return x > 0; })) w[0] = 0;
    std::discrete_distribution<int> pick(w.begin(), w.end());
    switch (static_cast<Production>(pick(rng_))) {
      case Production::Literal: return literal();
      case Production::And: return Formula::conj(gen(depth - 1), gen(depth - 1));
      case Production::Or: return Formula::disj(gen(depth - 1), gen(depth - 1));
      case Production::Box: return Formula::box(gen(depth - 1));
      case Production::Diamond: return Formula::diamond(gen(depth - 1));
      case Production::ExistsBox: return bind(depth, [](Var x, Formula b) { return Formula::exists(x, Formula::box(b)); });
      case Production::ForallDiamond: return bind(depth, [](Var x, Formula b) { return Formula::forall(x, Formula::diamond(b)); });
      case Production::BoxExists: return bind(depth, [](Var x, Formula b) { return Formula::box(Formula::exists(x, b)); });
      case Production::DiamondForall: return bind(depth, [](Var x, Formula b) { return Formula::diamond(Formula::forall(x, b)); });
    }
    return literal();
  }

  Formula bind(int depth, const std::function<Formula(Var, Formula)>& wrap) {
    const Var x = "x" + std::to_string(binders_++);
    scope_.push_back(x);
    const bool want = std::bernoulli_distribution(cfg_.use_bound)(rng_);
    Formula body = gen(depth - 1);
    for (int tries = 0; want && tries < 8 && !free_vars(body).contains(x); ++tries) body = gen(depth - 1);
    if (want && !free_vars(body).contains(x)) body = Formula::conj(body, literal_with(x));
    scope_.pop_back();
    return wrap(x, body);
  }

  Var var() {
    // "a" is the only free variable; it is never bound.
    std::uniform_int_distribution<std::size_t> d(0, scope_.size());
    const std::size_t i = d(rng_);
    return i == scope_.size() ? Var("a") : scope_[i];
  }

  Formula literal_with(const Var& x) {
    for (int tries = 0; tries < 16; ++tries) {
      Formula l = literal();
      if (free_vars(l).contains(x)) return l;
    }
    std::size_t p = 0;
    while (p < arity_.size() && arity_[p] == 0) ++p;
    if (p == arity_.size()) return literal();
    std::vector<Var> args(arity_[p], x);
    return Formula::literal(true, name(p), args);
  }

  Formula literal() {
    std::uniform_int_distribution<std::size_t> pd(0, arity_.size() - 1);
    const std::size_t p = pd(rng_);
    std::vector<Var> args;
    for (int i = 0; i < arity_[p]; ++i) args.push_back(var());
    return Formula::literal(std::bernoulli_distribution(0.5)(rng_), name(p), args);
  }

  static std::string name(std::size_t p) { return std::string(1, static_cast<char>('P' + p)); }

  const GenConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<int> arity_;
  std::vector<Var> scope_;
  std::size_t binders_ = 0;
};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void audit(const TableauNode& n, ForestAudit& a) {
  for (const auto& c : n.children) {
    if (c.rule == Rule::NestedForall && c.forest.kind == ForestKind::Forest) {
      const double b = forest_bound(n.gamma, n.s).value();
      const std::size_t sz = c.forest.forest->size();
      if (sz > a.largest) {
        a.largest = sz;
        a.bound = b;
      }
      if (static_cast<double>(sz) > b) a.ok = false;
    }
    audit(c, a);
  }
}

DiffRecord run_one(const GenConfig& cfg, std::size_t i, const OracleBounds& bounds, const std::optional<SearchLimits>& limits) {
  DiffRecord r;
  r.index = i;
  r.seed = corpus_seed(cfg.seed, i);
  GenConfig c = cfg;
  c.seed = r.seed;
  const Formula theta = gen_formula(c);
  r.formula = print_formula(theta);

  auto t0 = std::chrono::steady_clock::now();
  SearchResult res = search(theta, limits ? *limits : default_limits(theta));
  r.tableau_ms = ms_since(t0);
  r.tableau = res.verdict;
  if (res.verdict == Verdict::ResourceExhausted) r.notes.push_back("tableau ran out of resources: " + res.stats.exhausted);

  if (res.verdict == Verdict::Sat) {
    const Tableau& t = *res.tableau;
    auto v = verify_tableau(t, theta);
    r.certificate_ok = v.empty();
    for (const auto& m : v) r.issues.push_back("certificate: " + m);
    ForestAudit fa = audit_forests(t);
    r.largest_forest = fa.largest;
    r.forest_bound = fa.bound;
    r.bound_ok = fa.ok;
    if (!fa.ok) r.issues.push_back("forest larger than its size bound");
    try {
      KripkeModel m = extract_model(t);
      auto mv = validate_model(m);
      r.model_ok = mv.empty();
      for (const auto& s : mv) r.issues.push_back("model: " + s);
      if (r.model_ok) {
        for (const TableauNode* n : last_nodes(t)) {
          for (const auto& f : n->gamma) {
            if (!f.is_literal()) continue;
            Assignment id;
            for (const auto& x : free_vars(f)) id[x] = x;
            if (!check(m, to_string(n->world), id, f)) {
              r.literals_ok = false;
              r.issues.push_back("literal " + to_string(f) + " false at " + to_string(n->world));
            }
          }
        }
      } else {
        r.literals_ok = false;
      }
    } catch (const std::exception& e) {
      r.model_ok = false;
      r.issues.push_back(std::string("extraction: ") + e.what());
    }
  }

  t0 = std::chrono::steady_clock::now();
  try {
    r.oracle = bounded_model_search(prepare_formula(theta), bounds) ? "sat" : "none";
  } catch (const OracleResourceError&) {
    r.oracle = "resource";
    (res.verdict == Verdict::Unsat ? r.issues : r.notes).push_back("oracle ran out of resources");
  }
  r.oracle_ms = ms_since(t0);
  if (r.oracle == "sat" && res.verdict != Verdict::Sat) r.issues.push_back("oracle finds a model but the tableau says " + to_string(res.verdict));
  return r;
}

} // namespace

Formula gen_formula(const GenConfig& cfg) { return Generator(cfg).run(); }

std::uint64_t corpus_seed(std::uint64_t base, std::size_t i) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32), static_cast<std::uint32_t>(i)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::vector<Formula> gen_corpus(const GenConfig& cfg, std::size_t n) {
  std::vector<Formula> out;
  for (std::size_t i = 0; i < n; ++i) {
    GenConfig c = cfg;
    c.seed = corpus_seed(cfg.seed, i);
    out.push_back(gen_formula(c));
  }
  return out;
}

ForestAudit audit_forests(const Tableau& t) {
  ForestAudit a;
  audit(t.root, a);
  return a;
}

std::size_t DiffReport::discrepancies() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const DiffRecord& r) { return !r.issues.empty(); }));
}

DiffReport differential_run(const GenConfig& cfg, std::size_t n, const OracleBounds& bounds,
                            const std::optional<SearchLimits>& limits, unsigned threads) {
  DiffReport rep;
  rep.records.resize(n);
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) rep.records[i] = run_one(cfg, i, bounds, limits);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  if (n > 0) work();
  for (auto& t : pool) t.join();
  return rep;
}

std::string to_jsonl(const DiffReport& r) {
  std::string out;
  for (const auto& d : r.records) {
    nlohmann::ordered_json j;
    j["index"] = d.index;
    j["seed"] = d.seed;
    j["formula"] = d.formula;
    j["tableau"] = to_string(d.tableau);
    j["oracle"] = d.oracle;
    j["certificate_ok"] = d.certificate_ok;
    j["model_ok"] = d.model_ok;
    j["literals_ok"] = d.literals_ok;
    j["largest_forest"] = d.largest_forest;
    j["forest_bound"] = d.forest_bound;
    j["bound_ok"] = d.bound_ok;
    j["tableau_ms"] = d.tableau_ms;
    j["oracle_ms"] = d.oracle_ms;
    j["issues"] = d.issues;
    j["notes"] = d.notes;
    out += j.dump() + "\n";
  }
  return out;
}

} // namespace foml
