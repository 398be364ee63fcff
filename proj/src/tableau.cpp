#include "foml/tableau.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <tuple>

#include "foml/fragment.hpp"
#include "foml/parser.hpp"
#include "json.hpp"

namespace foml {

std::string to_string(Rule r) {
  switch (r) {
    case Rule::Root: return "root";
    case Rule::NestedForall: return "nested-forall";
    case Rule::TrivialSkolem: return "trivial-skolem";
    case Rule::And: return "and";
    case Rule::Or: return "or";
    case Rule::Exists: return "exists";
    case Rule::Forall: return "forall";
    case Rule::Diamond: return "diamond";
    case Rule::End: return "end";
  }
  return "?";
}

Rule rule_from_string(const std::string& s) {
  for (Rule r : {Rule::Root, Rule::NestedForall, Rule::TrivialSkolem, Rule::And, Rule::Or, Rule::Exists, Rule::Forall,
                 Rule::Diamond, Rule::End}) {
    if (to_string(r) == s) return r;
  }
  throw TableauError("unknown rule tag: " + s);
}

std::string to_string(const WorldName& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += '.';
    out += w[i];
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Sat: return "SAT";
    case Verdict::Unsat: return "UNSAT";
    case Verdict::ResourceExhausted: return "RESOURCE";
  }
  return "?";
}

SearchLimits default_limits(const Formula& theta) {
  SearchLimits l;
  l.max_depth = std::max<std::size_t>(l.max_depth, 2000 * (theta.size() + 1));
  return l;
}

Formula prepare_formula(const Formula& theta) {
  Formula f = to_nnf(theta);
  if (!is_clean(f)) f = clean_rename(f, {});
  return f;
}

TableauNode init_root(const Formula& theta, FreshVars& fresh) {
  auto cls = classify_fragment(theta);
  if (cls.category != FragmentCategory::EBBE) {
    throw FragmentError("formula is not in the EBBE fragment (category: " + to_string(cls.category) + ")");
  }
  if (!is_nnf(theta) || !is_clean(theta)) throw TableauError("root formula must be in NNF and clean");
  fresh.reserve(theta);
  TableauNode root;
  root.world = {"r"};
  root.gamma = {theta};
  root.s = free_vars(theta);
  for (const auto& v : outer_ex_vars(theta)) root.s.insert(v);
  root.s.insert(fresh.next());
  root.rule = Rule::Root;
  return root;
}

bool is_closed(const FormulaSet& gamma) {
  FormulaSet boxes, diamonds;
  for (const auto& f : gamma) {
    if (f.op() == Op::Box) boxes.insert(f.body());
    if (f.op() == Op::Diamond) diamonds.insert(f.body());
  }
  for (const auto& f : gamma) {
    if (gamma.contains(complement(f))) return true;
  }
  for (const auto& b : boxes) {
    Formula nb = complement(b);
    if (diamonds.contains(nb)) return true;
    if (!diamonds.empty() && boxes.contains(nb)) return true;
  }
  return false;
}

namespace {

void binders(const Formula& f, std::map<Var, int>& count) {
  if (f.is_quantifier()) ++count[f.symbol()];
  switch (f.op()) {
    case Op::Pred: return;
    case Op::Not: case Op::Exists: case Op::Forall: case Op::Box: case Op::Diamond: binders(f.body(), count); return;
    default: binders(f.lhs(), count); binders(f.rhs(), count); return;
  }
}

} // namespace

bool is_clean_wrt(const FormulaSet& gamma, const VarSet& s) {
  std::map<Var, int> count;
  for (const auto& f : gamma) binders(f, count);
  const VarSet fv = free_vars(gamma);
  for (const auto& [v, n] : count) {
    if (n > 1) return false;
    if (fv.contains(v) && !s.contains(v)) return false;
  }
  return true;
}

namespace {

Formula freshen(const Formula& f, FreshVars& fresh) { return clean_rename(f, bound_vars(f), fresh); }

enum class Outcome { Success, Fail, Incomplete };

struct MemoKey {
  FormulaSet gamma;
  VarSet s;
  int kind;
  const SkolemForest* forest;
  std::string world;
  auto operator<=>(const MemoKey&) const = default;
};

class Engine {
public:
  Engine(FreshVars& fresh, const SearchLimits& limits, const ChoiceHooks& hooks, SearchStats& stats)
      : fresh_(fresh), limits_(limits), hooks_(hooks), stats_(stats) {}

  Outcome expand(TableauNode& n, std::size_t depth) {
    if (out_of_budget()) return Outcome::Incomplete;
    if (++stats_.nodes > limits_.max_tableau_nodes) {
      stats_.exhausted = "max_tableau_nodes";
      stop_ = true;
      return Outcome::Incomplete;
    }
    if (depth > limits_.max_depth) {
      if (stats_.exhausted.empty()) stats_.exhausted = "max_depth";
      return Outcome::Incomplete;
    }
    if (is_closed(n.gamma)) return Outcome::Fail;
    MemoKey key{n.gamma, n.s, static_cast<int>(n.forest.kind), n.forest.forest.get(),
                hooks_.empty() ? std::string() : to_string(n.world)};
    if (memo_.contains(key)) {
      ++stats_.memo_hits;
      return Outcome::Fail;
    }
    Outcome r = step(n, depth);
    if (r != Outcome::Success) n.children.clear();
    if (r == Outcome::Fail) {
      if (n.forest.forest) keep_.push_back(n.forest.forest);
      memo_.insert(std::move(key));
    }
    return r;
  }

private:
  FreshVars& fresh_;
  const SearchLimits& limits_;
  const ChoiceHooks& hooks_;
  SearchStats& stats_;
  std::set<MemoKey> memo_;
  std::vector<std::shared_ptr<const SkolemForest>> keep_;

  bool stop_ = false;

  bool out_of_budget() const { return stop_; }

  TableauNode derive(const TableauNode& n, Rule rule, std::optional<Formula> principal) {
    TableauNode c;
    c.world = n.world;
    c.gamma = n.gamma;
    c.s = n.s;
    c.forest = n.forest;
    c.rule = rule;
    c.principal = std::move(principal);
    return c;
  }

  Outcome single(TableauNode& n, TableauNode child, std::size_t depth) {
    Outcome r = expand(child, depth + 1);
    if (r == Outcome::Success) n.children.push_back(std::move(child));
    return r;
  }

  Outcome step(TableauNode& n, std::size_t depth) {
    if (n.forest.kind == ForestKind::NotInit) return init_forest(n, depth);

    std::optional<Formula> f_and, f_or, f_ex, f_all;
    bool all_literals = true, all_modules = true;
    for (const auto& f : n.gamma) {
      if (!f.is_literal()) all_literals = false;
      if (!f.is_module()) all_modules = false;
      switch (f.op()) {
        case Op::And: if (!f_and) f_and = f; break;
        case Op::Or: if (!f_or) f_or = f; break;
        case Op::Exists: if (!f_ex) f_ex = f; break;
        case Op::Forall: if (!f_all) f_all = f; break;
        default: break;
      }
    }
    if (all_literals) return Outcome::Success;

    if (f_and) {
      TableauNode c = derive(n, Rule::And, f_and);
      c.gamma.erase(*f_and);
      c.gamma.insert(f_and->lhs());
      c.gamma.insert(f_and->rhs());
      return single(n, std::move(c), depth);
    }
    if (f_or) return apply_or(n, *f_or, depth);
    if (f_ex) {
      if (!n.s.contains(f_ex->symbol())) throw TableauError("existential witness " + f_ex->symbol() + " is not in S at " + to_string(n.world));
      TableauNode c = derive(n, Rule::Exists, f_ex);
      c.gamma.erase(*f_ex);
      c.gamma.insert(f_ex->body());
      return single(n, std::move(c), depth);
    }
    if (f_all) {
      TableauNode c = derive(n, Rule::Forall, f_all);
      c.gamma.erase(*f_all);
      VarSet dom = n.s;
      if (n.forest.kind == ForestKind::Forest) {
        for (const auto& v : n.forest.forest->nodes()) dom.insert(v);
      }
      for (const auto& z : dom) c.gamma.insert(freshen(substitute(f_all->body(), f_all->symbol(), z), fresh_));
      return single(n, std::move(c), depth);
    }
    if (!all_modules) throw TableauError("no rule applies at " + to_string(n.world));
    return apply_modal(n, depth);
  }

  Outcome init_forest(TableauNode& n, std::size_t depth) {
    std::optional<NestedForall> nf;
    try {
      nf = unique_nested_forall(n.gamma);
    } catch (const ForestError& e) {
      throw TableauError(std::string(e.what()) + " at " + to_string(n.world));
    }
    if (!nf) {
      TableauNode c = derive(n, Rule::TrivialSkolem, std::nullopt);
      c.forest = ForestState::empty_tree();
      return single(n, std::move(c), depth);
    }

    bool incomplete = false;
    std::size_t tried = 0;
    const ForestBound bound = forest_bound(n.gamma, n.s);
    auto attempt = [&](SkolemForest f) -> Outcome {
      ++stats_.forests_tried;
      if (f.size() > stats_.largest_forest) {
        stats_.largest_forest = f.size();
        stats_.largest_bound = bound.value();
      }
      if (static_cast<double>(f.size()) > bound.value()) ++stats_.bound_violations;
      TableauNode c = derive(n, Rule::NestedForall, nf->formula);
      c.gamma = expand_forest(f, n.gamma, fresh_);
      c.s = f.nodes();
      c.forest = ForestState::of(std::move(f));
      return single(n, std::move(c), depth);
    };

    if (hooks_.forests) {
      for (auto& f : hooks_.forests(n.world, n.gamma, n.s, fresh_)) {
        Outcome r = attempt(std::move(f));
        if (r == Outcome::Success) return r;
        if (r == Outcome::Incomplete) incomplete = true;
        if (out_of_budget()) return Outcome::Incomplete;
      }
    }
    ForestLimits fl{limits_.max_forest_nodes, limits_.max_trees, limits_.max_branch_choices};
    std::optional<ForestEnumerator> en;
    try {
      en.emplace(n.gamma, n.s, fl);
    } catch (const ForestLimitError&) {
      if (stats_.exhausted.empty()) stats_.exhausted = "forest enumeration";
      return Outcome::Incomplete;
    }
    for (;;) {
      std::optional<SkolemForest> f;
      try {
        f = en->next(fresh_);
      } catch (const ForestLimitError&) {
        if (stats_.exhausted.empty()) stats_.exhausted = "max_trees";
        return Outcome::Incomplete;
      }
      if (!f) break;
      if (++tried > limits_.max_branch_choices) {
        if (stats_.exhausted.empty()) stats_.exhausted = "max_branch_choices";
        return Outcome::Incomplete;
      }
      Outcome r = attempt(std::move(*f));
      if (r == Outcome::Success) return r;
      if (r == Outcome::Incomplete) incomplete = true;
      if (out_of_budget()) return Outcome::Incomplete;
    }
    if (en->truncated()) {
      if (stats_.exhausted.empty()) stats_.exhausted = "max_forest_nodes";
      incomplete = true;
    }
    return incomplete ? Outcome::Incomplete : Outcome::Fail;
  }

  Outcome apply_or(TableauNode& n, const Formula& f, std::size_t depth) {
    std::vector<int> order;
    if (hooks_.or_order) order = hooks_.or_order(n.world, n.gamma, f);
    for (int i : {0, 1}) {
      if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);
    }
    bool incomplete = false;
    for (int i : order) {
      if (i != 0 && i != 1) continue;
      TableauNode c = derive(n, Rule::Or, f);
      c.gamma.erase(f);
      c.gamma.insert(i == 0 ? f.lhs() : f.rhs());
      Outcome r = single(n, std::move(c), depth);
      if (r == Outcome::Success) return r;
      if (r == Outcome::Incomplete) incomplete = true;
      if (out_of_budget()) return Outcome::Incomplete;
    }
    return incomplete ? Outcome::Incomplete : Outcome::Fail;
  }

  Outcome apply_modal(TableauNode& n, std::size_t depth) {
    std::vector<Formula> diamonds;
    FormulaSet box_bodies, literals;
    for (const auto& f : n.gamma) {
      if (f.op() == Op::Diamond) diamonds.push_back(f);
      else if (f.op() == Op::Box) box_bodies.insert(f.body());
      else literals.insert(f);
    }
    if (diamonds.empty()) {
      TableauNode c = derive(n, Rule::End, std::nullopt);
      c.gamma = literals;
      return single(n, std::move(c), depth);
    }
    std::vector<DiamondGroup> plan;
    if (hooks_.diamonds) plan = hooks_.diamonds(n.world, n.gamma, diamonds);
    if (plan.empty()) {
      for (std::size_t i = 0; i < diamonds.size(); ++i) plan.push_back({std::to_string(i), {diamonds[i]}});
    }
    VarSet box_outer = outer_ex_vars(box_bodies);
    bool incomplete = false;
    for (const auto& g : plan) {
      TableauNode c;
      c.world = n.world;
      c.world.push_back(g.segment);
      c.gamma = box_bodies;
      c.s = n.s;
      c.s.insert(box_outer.begin(), box_outer.end());
      for (const auto& d : g.sources) {
        c.gamma.insert(d.body());
        for (const auto& v : outer_ex_vars(d.body())) c.s.insert(v);
      }
      c.rule = Rule::Diamond;
      c.principal = g.sources.front();
      c.diamond_sources = g.sources;
      Outcome r = expand(c, depth + 1);
      if (r == Outcome::Fail) return Outcome::Fail;
      if (r == Outcome::Incomplete) {
        incomplete = true;
        if (out_of_budget()) return Outcome::Incomplete;
        continue;
      }
      n.children.push_back(std::move(c));
    }
    return incomplete ? Outcome::Incomplete : Outcome::Success;
  }
};

Verdict to_verdict(Outcome o) {
  switch (o) {
    case Outcome::Success: return Verdict::Sat;
    case Outcome::Fail: return Verdict::Unsat;
    case Outcome::Incomplete: return Verdict::ResourceExhausted;
  }
  return Verdict::ResourceExhausted;
}

} // namespace

Verdict search_from(TableauNode& start, FreshVars& fresh, const SearchLimits& limits, const ChoiceHooks& hooks,
                    SearchStats* stats) {
  SearchStats local;
  SearchStats& st = stats ? *stats : local;
  Engine e(fresh, limits, hooks, st);
  start.children.clear();
  return to_verdict(e.expand(start, 0));
}

SearchResult search(const Formula& theta_in, const SearchLimits& limits, const ChoiceHooks& hooks) {
  const Formula theta = prepare_formula(theta_in);
  FreshVars fresh;
  TableauNode root = init_root(theta, fresh);
  SearchResult res;
  res.verdict = search_from(root, fresh, limits, hooks, &res.stats);
  if (res.verdict == Verdict::Sat) res.tableau = Tableau{theta, std::move(root)};
  return res;
}

FreshVars tableau_fresh(const Tableau& t) {
  FreshVars fresh;
  fresh.reserve(t.theta);
  for_each_node(t.root, [&](const TableauNode& n, std::size_t) {
    fresh.reserve(all_vars(n.gamma));
    fresh.reserve(n.s);
    if (n.forest.kind == ForestKind::Forest) fresh.reserve(n.forest.forest->nodes());
  });
  return fresh;
}

void for_each_node(const TableauNode& n, const std::function<void(const TableauNode&, std::size_t)>& fn) {
  std::function<void(const TableauNode&, std::size_t)> rec = [&](const TableauNode& m, std::size_t d) {
    fn(m, d);
    for (const auto& c : m.children) rec(c, d + 1);
  };
  rec(n, 0);
}

std::size_t count_nodes(const TableauNode& n) {
  std::size_t k = 0;
  for_each_node(n, [&](const TableauNode&, std::size_t) { ++k; });
  return k;
}

namespace {

std::string vars_text(const VarSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& v : s) {
    if (!first) out += ", ";
    first = false;
    out += v;
  }
  return out + "}";
}

std::string forest_summary(const ForestState& f) {
  switch (f.kind) {
    case ForestKind::NotInit: return "uninit";
    case ForestKind::EmptyTree: return "empty";
    case ForestKind::Forest: {
      std::string out = "forest[";
      bool first = true;
      for (const auto& v : f.forest->preorder()) {
        if (!first) out += ' ';
        first = false;
        out += v;
        auto it = f.forest->parent.find(v);
        if (it != f.forest->parent.end()) out += "<" + it->second;
      }
      return out + "]";
    }
  }
  return "?";
}

} // namespace

std::string dump_tableau(const Tableau& t) {
  std::ostringstream os;
  for_each_node(t.root, [&](const TableauNode& n, std::size_t d) {
    os << std::string(2 * d, ' ') << to_string(n.world) << " | " << to_string(n.rule) << " | " << to_string(n.gamma)
       << " | " << vars_text(n.s) << " | " << forest_summary(n.forest) << "\n";
  });
  return os.str();
}

} // namespace foml


namespace foml {

namespace {

using nlohmann::ordered_json;

ordered_json formulas_json(const FormulaSet& fs) {
  ordered_json a = ordered_json::array();
  for (const auto& f : fs) a.push_back(print_formula(f));
  return a;
}

ordered_json atom_json(const Atom& a) { return formulas_json(a.members); }

ordered_json forest_json(const ForestState& f) {
  if (f.kind == ForestKind::NotInit) return nullptr;
  if (f.kind == ForestKind::EmptyTree) return "empty";
  ordered_json j = ordered_json::object();
  j["roots"] = f.forest->roots;
  ordered_json nodes = ordered_json::array();
  for (const auto& v : f.forest->preorder()) {
    ordered_json n = ordered_json::object();
    n["var"] = v;
    auto it = f.forest->parent.find(v);
    n["parent"] = it == f.forest->parent.end() ? ordered_json(nullptr) : ordered_json(it->second);
    n["children"] = f.forest->kids(v);
    n["label"] = atom_json(f.forest->label.at(v));
    nodes.push_back(n);
  }
  j["nodes"] = nodes;
  return j;
}

ordered_json node_json(const TableauNode& n) {
  ordered_json j = ordered_json::object();
  j["world"] = to_string(n.world);
  j["rule"] = to_string(n.rule);
  j["principal"] = n.principal ? ordered_json(print_formula(*n.principal)) : ordered_json(nullptr);
  if (!n.diamond_sources.empty()) {
    ordered_json d = ordered_json::array();
    for (const auto& f : n.diamond_sources) d.push_back(print_formula(f));
    j["diamond_sources"] = d;
  }
  j["gamma"] = formulas_json(n.gamma);
  j["s"] = n.s;
  j["forest"] = forest_json(n.forest);
  ordered_json c = ordered_json::array();
  for (const auto& ch : n.children) c.push_back(node_json(ch));
  j["children"] = c;
  return j;
}

FormulaSet formulas_from(const ordered_json& a) {
  FormulaSet out;
  for (const auto& s : a) out.insert(parse_formula(s.get<std::string>()));
  return out;
}

WorldName world_from(const std::string& s) {
  WorldName w;
  std::string cur;
  for (char c : s) {
    if (c == '.') {
      w.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  w.push_back(cur);
  return w;
}

ForestState forest_from(const ordered_json& j) {
  if (j.is_null()) return ForestState::not_init();
  if (j.is_string()) {
    if (j.get<std::string>() != "empty") throw TableauError("bad forest tag in certificate");
    return ForestState::empty_tree();
  }
  SkolemForest f;
  f.roots = j.at("roots").get<std::vector<Var>>();
  for (const auto& n : j.at("nodes")) {
    Var v = n.at("var").get<std::string>();
    if (!n.at("parent").is_null()) f.parent[v] = n.at("parent").get<std::string>();
    auto ks = n.at("children").get<std::vector<Var>>();
    if (!ks.empty()) f.children[v] = ks;
    f.label.emplace(v, Atom{formulas_from(n.at("label"))});
  }
  return ForestState::of(std::move(f));
}

TableauNode node_from(const ordered_json& j) {
  TableauNode n;
  n.world = world_from(j.at("world").get<std::string>());
  n.rule = rule_from_string(j.at("rule").get<std::string>());
  if (!j.at("principal").is_null()) n.principal = parse_formula(j.at("principal").get<std::string>());
  if (j.contains("diamond_sources")) {
    for (const auto& s : j.at("diamond_sources")) n.diamond_sources.push_back(parse_formula(s.get<std::string>()));
  }
  n.gamma = formulas_from(j.at("gamma"));
  for (const auto& v : j.at("s")) n.s.insert(v.get<std::string>());
  n.forest = forest_from(j.at("forest"));
  for (const auto& c : j.at("children")) n.children.push_back(node_from(c));
  return n;
}

} // namespace

std::string tableau_to_json(const Tableau& t) {
  ordered_json j = ordered_json::object();
  j["formula"] = print_formula(t.theta);
  j["root"] = node_json(t.root);
  return j.dump(2) + "\n";
}

Tableau tableau_from_json(const std::string& text) {
  try {
    auto j = ordered_json::parse(text);
    return Tableau{parse_formula(j.at("formula").get<std::string>()), node_from(j.at("root"))};
  } catch (const nlohmann::json::exception& e) {
    throw TableauError(std::string("malformed certificate: ") + e.what());
  }
}

} // namespace foml
