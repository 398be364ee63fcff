// foml :: tableau search
//
// Nodes (w : Γ, S, F). Rules, in priority order: nestedForall / trivialSkolem
// while F is uninitialised, then ∧, ∨, ∃, ∀ (smallest principal formula
// first), then ◇ or End once Γ holds modules only.

#ifndef FOML_TABLEAU_HPP_
#define FOML_TABLEAU_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skolem_forest.hpp"

namespace foml {

class TableauError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input outside the EBBE fragment.
class FragmentError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Rule { Root, NestedForall, TrivialSkolem, And, Or, Exists, Forall, Diamond, End };

std::string to_string(Rule r);
Rule rule_from_string(const std::string& s);

using WorldName = std::vector<std::string>;
std::string to_string(const WorldName& w);

struct TableauNode {
  WorldName world;
  FormulaSet gamma;
  VarSet s;
  ForestState forest;
  Rule rule = Rule::Root;                 // rule that produced this node
  std::optional<Formula> principal;       // formula that rule acted on
  std::vector<Formula> diamond_sources;   // ◇-formulas served by this world (◇-rule children)
  std::vector<TableauNode> children;
};

struct Tableau {
  Formula theta;   // the NNF, clean formula at the root
  TableauNode root;
};

struct SearchLimits {
  std::size_t max_tableau_nodes = 2'000'000;
  std::size_t max_depth = 200'000;
  std::size_t max_forest_nodes = 4096;
  std::size_t max_branch_choices = 100'000; // skolem forests tried at one node
  std::size_t max_trees = 200'000;           // tree shapes held in memory at once
};

// Limits scaled to the input: forests capped by the size bound of the largest
// nested universal in theta (never above the defaults).
SearchLimits default_limits(const Formula& theta);

struct DiamondGroup {
  std::string segment;
  std::vector<Formula> sources;
};

// Optional steering. Hooks change the order in which choices are tried (and may offer
// extra forests or group ◇-formulas), never which outcomes count as closed.
struct ChoiceHooks {
  // Disjunct order: 0 = left, 1 = right. Missing alternatives are appended.
  std::function<std::vector<int>(const WorldName&, const FormulaSet&, const Formula&)> or_order;
  // Forests tried before the canonical enumeration.
  std::function<std::vector<SkolemForest>(const WorldName&, const FormulaSet&, const VarSet&, FreshVars&)> forests;
  // Successor worlds for the ◇-formulas (in set order); must partition them.
  std::function<std::vector<DiamondGroup>(const WorldName&, const FormulaSet&, const std::vector<Formula>&)> diamonds;

  bool empty() const { return !or_order && !forests && !diamonds; }
};

enum class Verdict { Sat, Unsat, ResourceExhausted };
std::string to_string(Verdict v);

struct SearchStats {
  std::size_t nodes = 0;
  std::size_t forests_tried = 0;
  std::size_t memo_hits = 0;
  std::size_t largest_forest = 0;
  double largest_bound = 0;           // bound at the node of the largest forest
  std::size_t bound_violations = 0;   // forests larger than their size bound
  std::string exhausted;              // which limit ran out, if any
};

struct SearchResult {
  Verdict verdict = Verdict::Unsat;
  std::optional<Tableau> tableau;
  SearchStats stats;
};

// NNF, then clean renaming if needed.
Formula prepare_formula(const Formula& theta);

// (r : {θ}, FV(θ) ∪ outerExVar(θ) ∪ {z}, ⊥). Throws FragmentError unless θ is EBBE.
TableauNode init_root(const Formula& theta, FreshVars& fresh);

SearchResult search(const Formula& theta, const SearchLimits& limits = {}, const ChoiceHooks& hooks = {});

// Saturates `start` (whose rule tag and principal are kept) under the rules; used to rebuild
// part of a tableau. On success `start` receives its children.
Verdict search_from(TableauNode& start, FreshVars& fresh, const SearchLimits& limits, const ChoiceHooks& hooks,
                    SearchStats* stats = nullptr);

// Γ contains β and ¬β, □β with ◇¬β, or □β and □¬β next to some ◇.
bool is_closed(const FormulaSet& gamma);

// Each variable quantified at most once and bound ∩ free ⊆ s.
bool is_clean_wrt(const FormulaSet& gamma, const VarSet& s);

// A fresh-name source that avoids every variable in the tableau.
FreshVars tableau_fresh(const Tableau& t);

void for_each_node(const TableauNode& n, const std::function<void(const TableauNode&, std::size_t depth)>& fn);
std::size_t count_nodes(const TableauNode& n);

// `world | rule | Γ | S | F` per node, indented by tree depth.
std::string dump_tableau(const Tableau& t);

std::string tableau_to_json(const Tableau& t);
Tableau tableau_from_json(const std::string& text);

// Violations of the rule instances, openness, saturation and root shape; empty if valid.
std::vector<std::string> verify_tableau(const Tableau& t, const Formula& theta);

} // namespace foml

#endif // FOML_TABLEAU_HPP_
