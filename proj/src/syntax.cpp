#include "foml/syntax.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace foml {

void collect_arity(const Formula& f, Arity& into) {
  switch (f.op()) {
    case Op::Pred: {
      auto [it, inserted] = into.emplace(f.symbol(), f.args().size());
      if (!inserted && it->second != f.args().size()) {
        throw FormulaError("predicate " + f.symbol() + " used with arity " + std::to_string(it->second) +
                           " and " + std::to_string(f.args().size()));
      }
      return;
    }
    case Op::Not: case Op::Exists: case Op::Forall: case Op::Box: case Op::Diamond:
      collect_arity(f.body(), into);
      return;
    default:
      collect_arity(f.lhs(), into);
      collect_arity(f.rhs(), into);
  }
}

Arity collect_arity(const Formula& f) {
  Arity a;
  collect_arity(f, a);
  return a;
}

namespace {

Formula nnf(const Formula& f, bool neg) {
  switch (f.op()) {
    case Op::Pred: return neg ? Formula::negation(f) : f;
    case Op::Not: return nnf(f.body(), !neg);
    case Op::And:
      return neg ? Formula::disj(nnf(f.lhs(), true), nnf(f.rhs(), true))
                 : Formula::conj(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case Op::Or:
      return neg ? Formula::conj(nnf(f.lhs(), true), nnf(f.rhs(), true))
                 : Formula::disj(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case Op::Implies:
      return neg ? Formula::conj(nnf(f.lhs(), false), nnf(f.rhs(), true))
                 : Formula::disj(nnf(f.lhs(), true), nnf(f.rhs(), false));
    case Op::Iff:
      if (neg) {
        return Formula::disj(Formula::conj(nnf(f.lhs(), false), nnf(f.rhs(), true)),
                             Formula::conj(nnf(f.lhs(), true), nnf(f.rhs(), false)));
      }
      return Formula::disj(Formula::conj(nnf(f.lhs(), false), nnf(f.rhs(), false)),
                           Formula::conj(nnf(f.lhs(), true), nnf(f.rhs(), true)));
    case Op::Exists:
      return neg ? Formula::forall(f.symbol(), nnf(f.body(), true)) : Formula::exists(f.symbol(), nnf(f.body(), false));
    case Op::Forall:
      return neg ? Formula::exists(f.symbol(), nnf(f.body(), true)) : Formula::forall(f.symbol(), nnf(f.body(), false));
    case Op::Box:
      return neg ? Formula::diamond(nnf(f.body(), true)) : Formula::box(nnf(f.body(), false));
    case Op::Diamond:
      return neg ? Formula::box(nnf(f.body(), true)) : Formula::diamond(nnf(f.body(), false));
  }
  return f;
}

void free_vars_into(const Formula& f, VarSet& bound, VarSet& out) {
  switch (f.op()) {
    case Op::Pred:
      for (const auto& v : f.args()) {
        if (!bound.contains(v)) out.insert(v);
      }
      return;
    case Op::Exists: case Op::Forall: {
      bool added = bound.insert(f.symbol()).second;
      free_vars_into(f.body(), bound, out);
      if (added) bound.erase(f.symbol());
      return;
    }
    case Op::Not: case Op::Box: case Op::Diamond:
      free_vars_into(f.body(), bound, out);
      return;
    default:
      free_vars_into(f.lhs(), bound, out);
      free_vars_into(f.rhs(), bound, out);
  }
}

template <class Fn>
void visit(const Formula& f, Fn&& fn) {
  fn(f);
  switch (f.op()) {
    case Op::Pred: return;
    case Op::Not: case Op::Exists: case Op::Forall: case Op::Box: case Op::Diamond:
      visit(f.body(), fn);
      return;
    default:
      visit(f.lhs(), fn);
      visit(f.rhs(), fn);
  }
}

Formula rebuild(const Formula& f, const Formula& a, const Formula* b) {
  switch (f.op()) {
    case Op::Not: return Formula::negation(a);
    case Op::And: return Formula::conj(a, *b);
    case Op::Or: return Formula::disj(a, *b);
    case Op::Implies: return Formula::implies(a, *b);
    case Op::Iff: return Formula::iff(a, *b);
    case Op::Box: return Formula::box(a);
    case Op::Diamond: return Formula::diamond(a);
    default: return f;
  }
}

Formula make_quant(Op op, const Var& v, const Formula& body) {
  return op == Op::Exists ? Formula::exists(v, body) : Formula::forall(v, body);
}

Formula subst_rec(const Formula& f, const std::map<Var, Var>& sub) {
  if (sub.empty()) return f;
  switch (f.op()) {
    case Op::Pred: {
      std::vector<Var> args = f.args();
      bool changed = false;
      for (auto& a : args) {
        if (auto it = sub.find(a); it != sub.end()) {
          a = it->second;
          changed = true;
        }
      }
      return changed ? Formula::pred(f.symbol(), std::move(args)) : f;
    }
    case Op::Exists: case Op::Forall: {
      std::map<Var, Var> inner = sub;
      inner.erase(f.symbol());
      Formula body = f.body();
      VarSet body_free = free_vars(body);
      // drop entries that do not occur
      for (auto it = inner.begin(); it != inner.end();) {
        it = body_free.contains(it->first) ? std::next(it) : inner.erase(it);
      }
      if (inner.empty()) return f;
      Var v = f.symbol();
      bool captures = false;
      for (const auto& [from, to] : inner) captures = captures || to == v;
      if (captures) {
        VarSet avoid = all_vars(body);
        for (const auto& [from, to] : inner) {
          avoid.insert(from);
          avoid.insert(to);
        }
        FreshVars fresh(avoid);
        Var nv = fresh.next();
        body = subst_rec(body, {{v, nv}});
        v = nv;
      }
      return make_quant(f.op(), v, subst_rec(body, inner));
    }
    case Op::Not: case Op::Box: case Op::Diamond: {
      Formula a = subst_rec(f.body(), sub);
      return rebuild(f, a, nullptr);
    }
    default: {
      Formula a = subst_rec(f.lhs(), sub);
      Formula b = subst_rec(f.rhs(), sub);
      return rebuild(f, a, &b);
    }
  }
}

Formula clean_rec(const Formula& f, const VarSet& global_free, const VarSet& forbidden, VarSet& seen,
                  FreshVars& fresh) {
  switch (f.op()) {
    case Op::Pred: return f;
    case Op::Exists: case Op::Forall: {
      Var v = f.symbol();
      Formula body = f.body();
      if (global_free.contains(v) || seen.contains(v) || forbidden.contains(v)) {
        Var nv = fresh.next();
        body = subst_rec(body, {{v, nv}});
        v = nv;
      }
      seen.insert(v);
      return make_quant(f.op(), v, clean_rec(body, global_free, forbidden, seen, fresh));
    }
    case Op::Not: case Op::Box: case Op::Diamond:
      return rebuild(f, clean_rec(f.body(), global_free, forbidden, seen, fresh), nullptr);
    default: {
      Formula a = clean_rec(f.lhs(), global_free, forbidden, seen, fresh);
      Formula b = clean_rec(f.rhs(), global_free, forbidden, seen, fresh);
      return rebuild(f, a, &b);
    }
  }
}

void alpha_rec(const Formula& f, std::map<Var, std::size_t>& bound, std::size_t& counter, std::ostream& os) {
  auto var = [&](const Var& v) {
    if (auto it = bound.find(v); it != bound.end()) {
      os << '#' << it->second;
    } else {
      os << v;
    }
  };
  switch (f.op()) {
    case Op::Pred:
      os << f.symbol() << '(';
      for (std::size_t i = 0; i < f.args().size(); ++i) {
        if (i) os << ',';
        var(f.args()[i]);
      }
      os << ')';
      return;
    case Op::Exists: case Op::Forall: {
      std::size_t id = counter++;
      os << (f.op() == Op::Exists ? "E" : "A") << '#' << id << '.';
      auto prev = bound.find(f.symbol());
      std::optional<std::size_t> saved;
      if (prev != bound.end()) saved = prev->second;
      bound[f.symbol()] = id;
      alpha_rec(f.body(), bound, counter, os);
      if (saved) {
        bound[f.symbol()] = *saved;
      } else {
        bound.erase(f.symbol());
      }
      return;
    }
    case Op::Not: os << '~'; alpha_rec(f.body(), bound, counter, os); return;
    case Op::Box: os << "[]"; alpha_rec(f.body(), bound, counter, os); return;
    case Op::Diamond: os << "<>"; alpha_rec(f.body(), bound, counter, os); return;
    default: {
      const char* sym = f.op() == Op::And ? "&" : f.op() == Op::Or ? "|" : f.op() == Op::Implies ? ">" : "=";
      os << '(';
      alpha_rec(f.lhs(), bound, counter, os);
      os << sym;
      alpha_rec(f.rhs(), bound, counter, os);
      os << ')';
    }
  }
}

} // namespace

Formula to_nnf(const Formula& f) { return nnf(f, false); }

bool is_nnf(const Formula& f) {
  bool ok = true;
  visit(f, [&](const Formula& g) {
    if (g.op() == Op::Implies || g.op() == Op::Iff) ok = false;
    if (g.op() == Op::Not && g.body().op() != Op::Pred) ok = false;
  });
  return ok;
}

Formula complement(const Formula& f) { return nnf(f, true); }

VarSet free_vars(const Formula& f) {
  VarSet bound, out;
  free_vars_into(f, bound, out);
  return out;
}

VarSet free_vars(const FormulaSet& fs) {
  VarSet out;
  for (const auto& f : fs) out.merge(free_vars(f));
  return out;
}

VarSet bound_vars(const Formula& f) {
  VarSet out;
  visit(f, [&](const Formula& g) {
    if (g.is_quantifier()) out.insert(g.symbol());
  });
  return out;
}

VarSet all_vars(const Formula& f) {
  VarSet out;
  visit(f, [&](const Formula& g) {
    if (g.is_quantifier()) out.insert(g.symbol());
    if (g.is_pred()) out.insert(g.args().begin(), g.args().end());
  });
  return out;
}

VarSet all_vars(const FormulaSet& fs) {
  VarSet out;
  for (const auto& f : fs) out.merge(all_vars(f));
  return out;
}

std::size_t modal_depth(const Formula& f) {
  switch (f.op()) {
    case Op::Pred: return 0;
    case Op::Box: case Op::Diamond: return 1 + modal_depth(f.body());
    case Op::Not: case Op::Exists: case Op::Forall: return modal_depth(f.body());
    default: return std::max(modal_depth(f.lhs()), modal_depth(f.rhs()));
  }
}

Formula substitute(const Formula& f, const std::map<Var, Var>& sub) {
  std::map<Var, Var> s;
  for (const auto& [a, b] : sub) {
    if (a != b) s.emplace(a, b);
  }
  return subst_rec(f, s);
}

Formula substitute(const Formula& f, const Var& from, const Var& to) { return substitute(f, {{from, to}}); }

Var FreshVars::next() {
  for (;;) {
    Var v = name(cursor_++);
    if (reserved_.insert(v).second) return v;
  }
}

void FreshVars::reserve(const Formula& f) { reserve(all_vars(f)); }

Formula clean_rename(const Formula& f, const VarSet& forbidden, FreshVars& fresh) {
  fresh.reserve(f);
  fresh.reserve(forbidden);
  VarSet seen;
  return clean_rec(f, free_vars(f), forbidden, seen, fresh);
}

Formula clean_rename(const Formula& f, const VarSet& forbidden) {
  FreshVars fresh;
  return clean_rename(f, forbidden, fresh);
}

bool is_clean(const Formula& f) {
  VarSet fv = free_vars(f);
  VarSet seen;
  bool ok = true;
  visit(f, [&](const Formula& g) {
    if (!g.is_quantifier()) return;
    if (fv.contains(g.symbol()) || !seen.insert(g.symbol()).second) ok = false;
  });
  return ok;
}

bool is_clean(const FormulaSet& fs) {
  if (fs.empty()) return true;
  auto it = fs.begin();
  Formula all = *it;
  for (++it; it != fs.end(); ++it) all = Formula::conj(all, *it);
  return is_clean(all);
}

std::string alpha_key(const Formula& f) {
  std::ostringstream os;
  std::map<Var, std::size_t> bound;
  std::size_t counter = 0;
  alpha_rec(f, bound, counter, os);
  return os.str();
}

bool alpha_equivalent(const Formula& a, const Formula& b) { return alpha_key(a) == alpha_key(b); }

} // namespace foml
