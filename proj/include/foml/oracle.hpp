// foml :: bounded finite-model search
//
// Exhaustive over tree-shaped frames, monotone local domains and free-variable
// assignments; valuations are found by grounding the formula over each
// candidate and handing the propositional problem to a small DPLL solver.

#ifndef FOML_ORACLE_HPP_
#define FOML_ORACLE_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>

#include "kripke.hpp"

namespace foml {

struct OracleBounds {
  int max_worlds = 3;
  int max_domain = 2;
  int tree_depth = 3; // longest root-to-leaf path, in edges
  std::size_t max_candidates = 2'000'000;
  std::size_t max_decisions = 20'000'000; // summed over all DPLL calls
};

struct OracleModel {
  KripkeModel model;
  WorldId world;
  Assignment sigma;
};

class OracleResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// First model in canonical enumeration order, or nullopt if none exists within the bounds.
std::optional<OracleModel> bounded_model_search(const Formula& phi, const OracleBounds& bounds);

} // namespace foml

#endif // FOML_ORACLE_HPP_
