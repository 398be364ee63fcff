// foml :: random EBBE formulas and the tableau/oracle differential harness

#ifndef FOML_TESTGEN_HPP_
#define FOML_TESTGEN_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "tableau.hpp"

namespace foml {

// Production weights, in order: literal, and, or, box, diamond,
// exists-box, forall-diamond, box-exists, diamond-forall. The root is never a bare literal.
enum class Production { Literal, And, Or, Box, Diamond, ExistsBox, ForallDiamond, BoxExists, DiamondForall };
inline constexpr std::size_t kProductions = 9;

struct GenConfig {
  int max_depth = 4;
  int max_predicates = 2;
  int max_arity = 2;
  std::array<double, kProductions> weights{2, 2, 2, 1, 1, 2, 1, 1, 2};
  std::uint64_t seed = 1;
  double use_bound = 0.9;  // probability that a binder occurs in its body
};

// Clean, NNF, EBBE; a deterministic function of cfg. Throws std::invalid_argument on a bad config.
Formula gen_formula(const GenConfig& cfg);

// Seed of the i-th formula of a corpus.
std::uint64_t corpus_seed(std::uint64_t base, std::size_t i);
std::vector<Formula> gen_corpus(const GenConfig& cfg, std::size_t n);

struct DiffRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string formula;
  Verdict tableau = Verdict::Unsat;
  std::string oracle;  // "sat", "none" or "resource"
  bool certificate_ok = true;
  bool model_ok = true;
  bool literals_ok = true;
  std::size_t largest_forest = 0;
  double forest_bound = 0;
  bool bound_ok = true;
  double tableau_ms = 0;
  double oracle_ms = 0;
  std::vector<std::string> issues;  // discrepancies; empty when the record agrees
  std::vector<std::string> notes;   // undecided runs that contradict nothing
};

struct DiffReport {
  std::vector<DiffRecord> records;
  std::size_t discrepancies() const;
};

// Runs search and bounded_model_search on n generated formulas (threads > 0 caps the worker count).
DiffReport differential_run(const GenConfig& cfg, std::size_t n, const OracleBounds& bounds,
                            const std::optional<SearchLimits>& limits = std::nullopt, unsigned threads = 0);

std::string to_jsonl(const DiffReport& r);

// Forest size against its bound at every nested-forall node of t; returns (largest size, its bound, all within).
struct ForestAudit {
  std::size_t largest = 0;
  double bound = 0;
  bool ok = true;
};
ForestAudit audit_forests(const Tableau& t);

} // namespace foml

#endif // FOML_TESTGEN_HPP_
