// foml :: components, modules, atoms
//
// The per-world decomposition used by the tableau: components are the
// subformulas evaluated at the current world, modules are the units that
// stop the decomposition (literals and modal formulas), and an atom records
// one way a domain element can satisfy the body of a nested universal.

#ifndef FOML_COMPONENTS_HPP_
#define FOML_COMPONENTS_HPP_

#include <compare>
#include <vector>

#include "formula.hpp"

namespace foml {

// Requires NNF. Modules are their own components; binary connectives distribute;
// a quantified formula contributes itself and the components of its body.
FormulaSet components(const Formula& f);

// Existential variables not under a universal, collected down to module boundaries.
VarSet outer_ex_vars(const Formula& f);
VarSet outer_ex_vars(const FormulaSet& fs);

// Requires a Forall. True iff another quantified formula occurs among its components.
bool is_nested_forall(const Formula& f);
// Formulas of `fs` that are nested universals, in set order.
std::vector<Formula> nested_foralls(const FormulaSet& fs);

// No formula together with its complement.
bool is_consistent(const FormulaSet& fs);

// The atom universe of psi: psi itself, the conjunctions and disjunctions reached from it,
// and the modules and quantified formulas where that descent stops. Preorder, no repeats.
std::vector<Formula> atom_closure(const Formula& psi);

struct Atom {
  FormulaSet members;

  // Members whose top symbol is an existential, in set order.
  std::vector<Formula> existentials() const;
  // Modules and quantified members, i.e. what still has to be satisfied once the atom is fixed.
  std::vector<Formula> obligations() const;
  bool contains(const Formula& f) const { return members.contains(f); }

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

// The inclusion-minimal consistent subsets A of atom_closure(psi) with psi in A, both
// conjuncts of every conjunction in A, and some disjunct of every disjunction in A.
// Ordered by membership along atom_closure(psi), members first. `x` is the distinguished
// variable; it names the element the atom describes and does not affect the result.
std::vector<Atom> enumerate_atoms(const Formula& psi, const Var& x);

} // namespace foml

#endif // FOML_COMPONENTS_HPP_
