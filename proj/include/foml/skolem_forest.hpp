// foml :: skolem forests
//
// A forest whose roots are the current local domain and whose nodes are
// labelled by atoms of the unique nested universal ∀x ψ. Child i of a
// non-leaf node is the witness for the i-th existential of its label (set
// order); a leaf either needs no witness or repeats a label already seen on
// two strict ancestors.

#ifndef FOML_SKOLEM_FOREST_HPP_
#define FOML_SKOLEM_FOREST_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "components.hpp"
#include "syntax.hpp"

namespace foml {

class ForestError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ForestLimitError : public std::runtime_error {
public:
  ForestLimitError(const std::string& msg, std::size_t partial) : std::runtime_error(msg), partial_(partial) {}
  std::size_t partial_count() const noexcept { return partial_; }

private:
  std::size_t partial_;
};

struct SkolemForest {
  std::vector<Var> roots;
  std::map<Var, Var> parent;
  std::map<Var, std::vector<Var>> children;
  std::map<Var, Atom> label;

  VarSet nodes() const;
  std::size_t size() const { return label.size(); }
  bool contains(const Var& v) const { return label.contains(v); }
  bool is_leaf(const Var& v) const;
  const std::vector<Var>& kids(const Var& v) const;
  // Root first, v last.
  std::vector<Var> path(const Var& v) const;
  std::size_t depth(const Var& v) const { return path(v).size() - 1; }
  // Roots in order, each tree in preorder.
  std::vector<Var> preorder() const;
  std::vector<Var> leaves() const;

  friend bool operator==(const SkolemForest&, const SkolemForest&) = default;
};

enum class ForestKind { NotInit, EmptyTree, Forest };

struct ForestState {
  ForestKind kind = ForestKind::NotInit;
  std::shared_ptr<const SkolemForest> forest;

  static ForestState not_init() { return {}; }
  static ForestState empty_tree() { return {ForestKind::EmptyTree, nullptr}; }
  static ForestState of(SkolemForest f) { return {ForestKind::Forest, std::make_shared<const SkolemForest>(std::move(f))}; }

  friend bool operator==(const ForestState& a, const ForestState& b) {
    if (a.kind != b.kind) return false;
    return a.kind != ForestKind::Forest || a.forest == b.forest || *a.forest == *b.forest;
  }
};

struct NestedForall {
  Formula formula; // ∀x ψ
  Var x;
  Formula body;    // ψ
};

// The nested universal of gamma, if any. Throws ForestError if there is more than one.
std::optional<NestedForall> unique_nested_forall(const FormulaSet& gamma);

// Throws ForestError unless gamma holds exactly one nested universal.
std::vector<std::string> validate_forest(const SkolemForest& f, const FormulaSet& gamma, const VarSet& s);

// (gamma ∪ gamma') \ {∀x ψ}. Bound variables of added formulas are renamed with `fresh`;
// the binder of each witness formula ∃y ψ' is the designated child.
FormulaSet expand_forest(const SkolemForest& f, const FormulaSet& gamma, FreshVars& fresh);
FormulaSet expand_forest(const SkolemForest& f, const FormulaSet& gamma);

// |S| · max(b,2)^(2A+2) with A = number of atoms, b = max existentials per atom.
struct ForestBound {
  std::size_t roots = 0;
  std::size_t atoms = 0;
  std::size_t branching = 0;
  double value() const;
};
ForestBound forest_bound(const FormulaSet& gamma, const VarSet& s);

struct ForestLimits {
  std::size_t max_forest_nodes = 4096;
  std::size_t max_trees = 200'000; // tree shapes held in memory at once
  std::size_t max_forests = 1'000'000;
};

// Lazily enumerates the minimal skolem forests wrt (gamma, s), smallest total size first.
// Within one size, root tree sizes run through their compositions in lexicographic order
// and, for fixed sizes, the trees of the last root vary fastest.
// Child names are drawn from `fresh` when a forest is materialized.
class ForestEnumerator {
public:
  ForestEnumerator(const FormulaSet& gamma, const VarSet& s, ForestLimits limits = {});
  ~ForestEnumerator();
  ForestEnumerator(ForestEnumerator&&) noexcept;
  ForestEnumerator& operator=(ForestEnumerator&&) noexcept;

  // Throws ForestLimitError once more than max_trees tree shapes are needed.
  std::optional<SkolemForest> next(FreshVars& fresh);
  // Forest count if it fits in size_t, else SIZE_MAX.
  std::size_t total() const;
  // True once the enumeration stopped at max_forest_nodes with larger forests left over.
  bool truncated() const;
  const std::vector<Atom>& atoms() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// All minimal forests; throws ForestLimitError (with the partial count) past the limits.
std::vector<SkolemForest> enumerate_forests(const FormulaSet& gamma, const VarSet& s, FreshVars& fresh,
                                            ForestLimits limits = {});

// Grafts a renamed copy of the subtree at z1 (the root-most ancestor of leaf z sharing its
// label) so that z takes z1's place, then prunes the copy back to a minimal forest.
// `copy_of` receives new-variable -> original-variable for every added node.
SkolemForest extend_forest(const SkolemForest& f, const Var& z, FreshVars& fresh,
                           std::map<Var, Var>* copy_of = nullptr);

// Indented text tree, one node per line: `var : {atom members}`.
std::string dump_forest(const SkolemForest& f);

} // namespace foml

#endif // FOML_SKOLEM_FOREST_HPP_
