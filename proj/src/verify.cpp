#include <algorithm>
#include <set>

#include "foml/fragment.hpp"
#include "foml/tableau.hpp"

namespace foml {

namespace {

// Formula sets compared up to renaming of bound variables, except that the binder of a
// top-level witness formula ∃y β with y in `named` is part of the key.
std::vector<std::string> keys(const FormulaSet& fs, const VarSet& named) {
  std::vector<std::string> out;
  for (const auto& f : fs) {
    std::string k = alpha_key(f);
    if (f.op() == Op::Exists && named.contains(f.symbol())) k = f.symbol() + ":" + k;
    out.push_back(std::move(k));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool same_upto_alpha(const FormulaSet& a, const FormulaSet& b, const VarSet& named) { return keys(a, named) == keys(b, named); }

class Verifier {
public:
  std::vector<std::string> out;

  void node(const TableauNode& n) {
    const std::string at = to_string(n.world) + " (" + to_string(n.rule) + ")";
    if (is_closed(n.gamma)) out.push_back(at + ": node is closed");
    if (!is_clean_wrt(n.gamma, n.s)) out.push_back(at + ": formula set is not clean");
    if (n.forest.kind != ForestKind::NotInit && !nested_foralls(n.gamma).empty()) {
      out.push_back(at + ": initialised forest but a nested universal remains");
    }
    if (n.children.empty()) {
      leaf(n, at);
      return;
    }
    const Rule r = n.children.front().rule;
    for (const auto& c : n.children) {
      if (c.rule != r) out.push_back(at + ": children produced by different rules");
      if (r != Rule::Diamond && c.world != n.world) out.push_back(at + ": world name changed by a non-modal rule");
    }
    if (r != Rule::Diamond && n.children.size() != 1) out.push_back(at + ": rule " + to_string(r) + " must have one child");
    const bool uninit = n.forest.kind == ForestKind::NotInit;
    if ((r == Rule::NestedForall || r == Rule::TrivialSkolem) != uninit) {
      out.push_back(at + ": rule " + to_string(r) + " is not allowed with forest state here");
    }
    const TableauNode& c = n.children.front();
    switch (r) {
      case Rule::NestedForall: nested(n, c, at); break;
      case Rule::TrivialSkolem:
        if (!nested_foralls(n.gamma).empty()) out.push_back(at + ": trivial-skolem with a nested universal");
        if (c.gamma != n.gamma || c.s != n.s || c.forest.kind != ForestKind::EmptyTree) out.push_back(at + ": bad trivial-skolem child");
        break;
      case Rule::And: case Rule::Or: case Rule::Exists: case Rule::Forall: local(n, c, r, at); break;
      case Rule::Diamond: diamond(n, at); break;
      case Rule::End: end(n, c, at); break;
      case Rule::Root: out.push_back(at + ": root tag below the root"); break;
    }
    for (const auto& ch : n.children) node(ch);
  }

private:
  void leaf(const TableauNode& n, const std::string& at) {
    if (n.forest.kind == ForestKind::NotInit) out.push_back(at + ": leaf with uninitialised forest");
    for (const auto& f : n.gamma) {
      if (!f.is_literal()) {
        out.push_back(at + ": leaf is not saturated (" + to_string(f) + ")");
        return;
      }
    }
  }

  void nested(const TableauNode& n, const TableauNode& c, const std::string& at) {
    std::vector<Formula> nf;
    try {
      nf = nested_foralls(n.gamma);
    } catch (const std::exception& e) {
      out.push_back(at + ": " + e.what());
      return;
    }
    if (nf.size() != 1) {
      out.push_back(at + ": nested-forall needs exactly one nested universal");
      return;
    }
    if (!c.principal || *c.principal != nf[0]) out.push_back(at + ": nested-forall principal mismatch");
    if (c.forest.kind != ForestKind::Forest) {
      out.push_back(at + ": nested-forall child has no forest");
      return;
    }
    const SkolemForest& f = *c.forest.forest;
    for (const auto& v : validate_forest(f, n.gamma, n.s)) out.push_back(at + ": forest: " + v);
    if (c.s != f.nodes()) out.push_back(at + ": S after nested-forall is not the forest's node set");
    try {
      FormulaSet expected = expand_forest(f, n.gamma);
      if (!same_upto_alpha(expected, c.gamma, f.nodes())) out.push_back(at + ": formula set is not the forest expansion");
    } catch (const std::exception& e) {
      out.push_back(at + ": expansion failed: " + e.what());
    }
  }

  void local(const TableauNode& n, const TableauNode& c, Rule r, const std::string& at) {
    if (c.s != n.s || !(c.forest == n.forest)) out.push_back(at + ": S or forest changed by " + to_string(r));
    if (!c.principal || !n.gamma.contains(*c.principal)) {
      out.push_back(at + ": principal formula missing from parent");
      return;
    }
    const Formula p = *c.principal;
    FormulaSet base = n.gamma;
    base.erase(p);
    auto with = [&](std::initializer_list<Formula> add) {
      FormulaSet e = base;
      e.insert(add.begin(), add.end());
      return e;
    };
    switch (r) {
      case Rule::And:
        if (p.op() != Op::And || c.gamma != with({p.lhs(), p.rhs()})) out.push_back(at + ": bad and-rule instance");
        break;
      case Rule::Or:
        if (p.op() != Op::Or || (c.gamma != with({p.lhs()}) && c.gamma != with({p.rhs()}))) out.push_back(at + ": bad or-rule instance");
        break;
      case Rule::Exists:
        if (p.op() != Op::Exists || c.gamma != with({p.body()})) out.push_back(at + ": bad exists-rule instance");
        if (p.op() == Op::Exists && !n.s.contains(p.symbol())) out.push_back(at + ": existential witness outside S");
        break;
      case Rule::Forall: {
        if (p.op() != Op::Forall) {
          out.push_back(at + ": bad forall-rule principal");
          break;
        }
        VarSet dom = n.s;
        if (n.forest.kind == ForestKind::Forest) {
          for (const auto& v : n.forest.forest->nodes()) dom.insert(v);
        }
        FormulaSet e = base;
        for (const auto& z : dom) e.insert(substitute(p.body(), p.symbol(), z));
        if (!same_upto_alpha(e, c.gamma, n.s)) out.push_back(at + ": bad forall-rule instance");
        break;
      }
      default: break;
    }
  }

  void diamond(const TableauNode& n, const std::string& at) {
    FormulaSet diamonds, boxes;
    for (const auto& f : n.gamma) {
      if (!f.is_module()) {
        out.push_back(at + ": diamond rule before all formulas are modules");
        return;
      }
      if (f.op() == Op::Diamond) diamonds.insert(f);
      if (f.op() == Op::Box) boxes.insert(f.body());
    }
    FormulaSet served;
    std::set<std::string> segments;
    const VarSet box_outer = outer_ex_vars(boxes);
    for (const auto& c : n.children) {
      const std::string cat = at + " -> " + to_string(c.world);
      if (c.world.size() != n.world.size() + 1 || !std::equal(n.world.begin(), n.world.end(), c.world.begin())) {
        out.push_back(cat + ": successor name does not extend the parent's");
      } else if (!segments.insert(c.world.back()).second) {
        out.push_back(cat + ": duplicate successor name");
      }
      if (c.diamond_sources.empty()) out.push_back(cat + ": successor serves no diamond formula");
      FormulaSet g = boxes;
      VarSet s = n.s;
      s.insert(box_outer.begin(), box_outer.end());
      for (const auto& d : c.diamond_sources) {
        if (!diamonds.contains(d)) out.push_back(cat + ": " + to_string(d) + " is not a diamond formula of the parent");
        if (!served.insert(d).second) out.push_back(cat + ": " + to_string(d) + " served twice");
        g.insert(d.body());
        for (const auto& v : outer_ex_vars(d.body())) s.insert(v);
      }
      if (nested_foralls(g).size() > 1) out.push_back(cat + ": successor holds two nested universals");
      if (c.gamma != g) out.push_back(cat + ": successor formula set mismatch");
      if (c.s != s) out.push_back(cat + ": successor S mismatch");
      if (c.forest.kind != ForestKind::NotInit) out.push_back(cat + ": successor forest must be uninitialised");
    }
    if (served != diamonds) out.push_back(at + ": some diamond formula has no successor");
  }

  void end(const TableauNode& n, const TableauNode& c, const std::string& at) {
    FormulaSet lits;
    for (const auto& f : n.gamma) {
      if (!f.is_module() || f.op() == Op::Diamond) {
        out.push_back(at + ": end rule needs boxes and literals only");
        return;
      }
      if (f.is_literal()) lits.insert(f);
    }
    if (c.gamma != lits || c.s != n.s || !(c.forest == n.forest)) out.push_back(at + ": bad end-rule instance");
  }
};

} // namespace

std::vector<std::string> verify_tableau(const Tableau& t, const Formula& theta) {
  std::vector<std::string> out;
  Formula th = prepare_formula(theta);
  if (!alpha_equivalent(th, t.theta)) out.push_back("certificate formula does not match the input");
  if (classify_fragment(th).category != FragmentCategory::EBBE) out.push_back("input is not EBBE");
  const TableauNode& r = t.root;
  if (r.world != WorldName{"r"}) out.push_back("root world must be r");
  if (r.rule != Rule::Root) out.push_back("root node must carry the root tag");
  if (r.gamma != FormulaSet{t.theta}) out.push_back("root formula set must be {theta}");
  if (r.forest.kind != ForestKind::NotInit) out.push_back("root forest must be uninitialised");
  VarSet base = free_vars(t.theta);
  for (const auto& v : outer_ex_vars(t.theta)) base.insert(v);
  VarSet extra;
  for (const auto& v : r.s) {
    if (!base.contains(v)) extra.insert(v);
  }
  if (!std::includes(r.s.begin(), r.s.end(), base.begin(), base.end())) out.push_back("root S misses a free or outer existential variable");
  const VarSet tv = all_vars(t.theta);
  if (extra.size() != 1 || tv.contains(*extra.begin())) out.push_back("root S must add exactly one fresh variable");
  Verifier v;
  v.node(r);
  out.insert(out.end(), v.out.begin(), v.out.end());
  return out;
}

} // namespace foml
