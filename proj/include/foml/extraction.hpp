// foml :: model extraction and the extension loop
//
// The model of an open tableau takes one world per world name, the S of the
// last node of that world as its local domain and that node's positive
// literals as its valuation. Forest leaves that still owe a witness are
// repaired by grafting (extend_forest) and rebuilding the affected subtree.

#ifndef FOML_EXTRACTION_HPP_
#define FOML_EXTRACTION_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "kripke.hpp"
#include "tableau.hpp"

namespace foml {

// Throws TableauError if the tableau is not saturated.
KripkeModel extract_model(const Tableau& t);

// Last node of every world name, in world-name order.
std::vector<const TableauNode*> last_nodes(const Tableau& t);

struct LeafViolation {
  WorldName world;
  Var leaf;
  Formula formula;        // ∃y β with the leaf substituted for the universal variable
  std::size_t depth = 0;  // distance of the leaf from its root
};

// Sorted by leaf depth, then world name, then variable.
std::vector<LeafViolation> find_leaf_violations(const Tableau& t, const KripkeModel& m);

struct Extension {
  Tableau tableau;
  std::vector<Var> fresh_vars;  // nodes added to the forest
  bool merged = true;           // new ◇-formulas share worlds with their originals
};

// Extends the forest of the nested-forall node at `world` at leaf z and rebuilds that subtree.
Extension extend_tableau(const Tableau& t, const WorldName& world, const Var& z, const SearchLimits& limits = {});

struct ExtensionStep {
  std::size_t iteration = 0;
  WorldName world;
  Var leaf;
  std::vector<Var> fresh_vars;
};

struct ExtensionTrace {
  std::vector<ExtensionStep> steps;
  std::vector<KripkeModel> snapshots;  // M_0 ... M_k
};

enum class ExtensionStatus { Satisfied, ResidualViolations };
std::string to_string(ExtensionStatus s);

struct ExtensionOutcome {
  KripkeModel model;
  ExtensionTrace trace;
  ExtensionStatus status = ExtensionStatus::ResidualViolations;
  Tableau tableau;
  std::vector<LeafViolation> violations;  // of the returned model
};

// Up to k extensions, each at a violation of minimal leaf depth.
ExtensionOutcome iterate_extensions(const Formula& theta, const Tableau& t, std::size_t k, const SearchLimits& limits = {});

// Worlds kept, local domains and valuations only grow.
bool extends_model(const KripkeModel& before, const KripkeModel& after);

// One JSON record per line: iteration, world, leaf, fresh variables and the model snapshot.
std::string trace_to_jsonl(const ExtensionTrace& trace);

} // namespace foml

#endif // FOML_EXTRACTION_HPP_
