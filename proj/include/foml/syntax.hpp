// foml :: syntactic operations
//
// Negation normal form, variable bookkeeping, capture-avoiding substitution
// and clean renaming.

#ifndef FOML_SYNTAX_HPP_
#define FOML_SYNTAX_HPP_

#include <cstddef>
#include <map>
#include <string>

#include "formula.hpp"

namespace foml {

using Arity = std::map<std::string, std::size_t>;

// Collects predicate arities; throws FormulaError naming the predicate on a clash.
Arity collect_arity(const Formula& f);
void collect_arity(const Formula& f, Arity& into);

// Pushes negations to predicates and eliminates -> and <->.
Formula to_nnf(const Formula& f);
bool is_nnf(const Formula& f);

// NNF of ~f.
Formula complement(const Formula& f);

VarSet free_vars(const Formula& f);
VarSet free_vars(const FormulaSet& fs);
VarSet bound_vars(const Formula& f);
VarSet all_vars(const Formula& f);
VarSet all_vars(const FormulaSet& fs);

std::size_t modal_depth(const Formula& f);

// Replaces free occurrences according to `sub`, renaming binders that would capture.
Formula substitute(const Formula& f, const std::map<Var, Var>& sub);
Formula substitute(const Formula& f, const Var& from, const Var& to);

// The fixed enumeration v0, v1, v2, ... of fresh variables. `next` returns the first
// name at or after the cursor that is not reserved, and reserves it.
class FreshVars {
public:
  FreshVars() = default;
  explicit FreshVars(VarSet reserved, std::size_t cursor = 0)
      : reserved_(std::move(reserved)), cursor_(cursor) {}

  Var next();
  void reserve(const Var& v) { reserved_.insert(v); }
  void reserve(const VarSet& vs) { reserved_.insert(vs.begin(), vs.end()); }
  void reserve(const Formula& f);
  bool is_reserved(const Var& v) const { return reserved_.contains(v); }
  std::size_t cursor() const noexcept { return cursor_; }

  static Var name(std::size_t index) { return "v" + std::to_string(index); }

private:
  VarSet reserved_;
  std::size_t cursor_ = 0;
};

// Renames binders, in preorder, that are free elsewhere in f, bound a second time, or in
// `forbidden`. Each renamed binder gets the first fresh variable of the enumeration.
Formula clean_rename(const Formula& f, const VarSet& forbidden);
Formula clean_rename(const Formula& f, const VarSet& forbidden, FreshVars& fresh);

// No variable both bound and free, and each variable quantified at most once.
bool is_clean(const Formula& f);
bool is_clean(const FormulaSet& fs);

// Canonical text with bound variables numbered in binding order; equal keys iff alpha-equivalent.
std::string alpha_key(const Formula& f);
bool alpha_equivalent(const Formula& a, const Formula& b);

} // namespace foml

#endif // FOML_SYNTAX_HPP_
