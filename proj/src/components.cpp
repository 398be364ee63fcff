#include "foml/components.hpp"

#include <algorithm>

#include "foml/syntax.hpp"

namespace foml {

namespace {

void components_into(const Formula& f, FormulaSet& out) {
  if (f.is_module()) {
    out.insert(f);
    return;
  }
  switch (f.op()) {
    case Op::And: case Op::Or:
      components_into(f.lhs(), out);
      components_into(f.rhs(), out);
      return;
    case Op::Exists: case Op::Forall:
      out.insert(f);
      components_into(f.body(), out);
      return;
    default:
      throw FormulaError("components: formula is not in NNF: " + to_string(f));
  }
}

void outer_into(const Formula& f, VarSet& out) {
  switch (f.op()) {
    case Op::And: case Op::Or:
      outer_into(f.lhs(), out);
      outer_into(f.rhs(), out);
      return;
    case Op::Exists:
      out.insert(f.symbol());
      outer_into(f.body(), out);
      return;
    default:
      return;
  }
}

void closure_into(const Formula& f, std::vector<Formula>& out, FormulaSet& seen) {
  if (!seen.insert(f).second) return;
  out.push_back(f);
  if (f.op() == Op::And || f.op() == Op::Or) {
    closure_into(f.lhs(), out, seen);
    closure_into(f.rhs(), out, seen);
  }
}

// Each call closes `cur` under the pending obligations, branching on disjunctions.
void expand(std::vector<Formula> pending, FormulaSet cur, std::vector<FormulaSet>& out) {
  while (!pending.empty()) {
    Formula f = pending.back();
    pending.pop_back();
    if (!cur.insert(f).second) continue;
    if (f.op() == Op::And) {
      pending.push_back(f.rhs());
      pending.push_back(f.lhs());
    } else if (f.op() == Op::Or) {
      if (cur.contains(f.lhs()) || cur.contains(f.rhs())) continue;
      auto p2 = pending;
      p2.push_back(f.rhs());
      expand(std::move(p2), cur, out);
      pending.push_back(f.lhs());
    }
  }
  out.push_back(std::move(cur));
}

} // namespace

FormulaSet components(const Formula& f) {
  FormulaSet out;
  components_into(f, out);
  return out;
}

VarSet outer_ex_vars(const Formula& f) {
  VarSet out;
  outer_into(f, out);
  return out;
}

VarSet outer_ex_vars(const FormulaSet& fs) {
  VarSet out;
  for (const auto& f : fs) outer_into(f, out);
  return out;
}

bool is_nested_forall(const Formula& f) {
  if (f.op() != Op::Forall) throw FormulaError("is_nested_forall: not a universal formula: " + to_string(f));
  for (const auto& c : components(f.body())) {
    if (c.is_quantifier()) return true;
  }
  return false;
}

std::vector<Formula> nested_foralls(const FormulaSet& fs) {
  std::vector<Formula> out;
  for (const auto& f : fs) {
    if (f.op() == Op::Forall && is_nested_forall(f)) out.push_back(f);
  }
  return out;
}

bool is_consistent(const FormulaSet& fs) {
  for (const auto& f : fs) {
    if (fs.contains(complement(f))) return false;
  }
  return true;
}

std::vector<Formula> atom_closure(const Formula& psi) {
  std::vector<Formula> out;
  FormulaSet seen;
  closure_into(psi, out, seen);
  return out;
}

std::vector<Formula> Atom::existentials() const {
  std::vector<Formula> out;
  for (const auto& f : members) {
    if (f.op() == Op::Exists) out.push_back(f);
  }
  return out;
}

std::vector<Formula> Atom::obligations() const {
  std::vector<Formula> out;
  for (const auto& f : members) {
    if (f.is_module() || f.is_quantifier()) out.push_back(f);
  }
  return out;
}

std::vector<Atom> enumerate_atoms(const Formula& psi, const Var& /*x*/) {
  std::vector<FormulaSet> raw;
  expand({psi}, {}, raw);
  std::vector<FormulaSet> cands;
  for (auto& s : raw) {
    if (is_consistent(s) && std::find(cands.begin(), cands.end(), s) == cands.end()) cands.push_back(std::move(s));
  }
  std::vector<Atom> atoms;
  for (const auto& s : cands) {
    bool minimal = true;
    for (const auto& t : cands) {
      if (t.size() < s.size() && std::includes(s.begin(), s.end(), t.begin(), t.end())) {
        minimal = false;
        break;
      }
    }
    if (minimal) atoms.push_back(Atom{s});
  }
  const auto closure = atom_closure(psi);
  auto key = [&](const Atom& a) {
    std::vector<bool> k;
    for (const auto& c : closure) k.push_back(!a.contains(c));
    return k;
  };
  std::sort(atoms.begin(), atoms.end(), [&](const Atom& a, const Atom& b) { return key(a) < key(b); });
  return atoms;
}

} // namespace foml
