// foml :: finite increasing-domain Kripke models

#ifndef FOML_KRIPKE_HPP_
#define FOML_KRIPKE_HPP_

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "formula.hpp"

namespace foml {

using WorldId = std::string;
using Element = std::string;
using Tuple = std::vector<Element>;
using Assignment = std::map<Var, Element>;

class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct KripkeModel {
  std::set<WorldId> worlds;
  std::set<Element> domain;
  std::set<std::pair<WorldId, WorldId>> edges;
  std::map<WorldId, std::set<Element>> local_domain;
  std::map<WorldId, std::map<std::string, std::set<Tuple>>> valuation;

  std::vector<WorldId> successors(const WorldId& w) const;
  const std::set<Element>& delta(const WorldId& w) const;
  bool holds(const WorldId& w, const std::string& pred, const Tuple& args) const;

  friend bool operator==(const KripkeModel&, const KripkeModel&) = default;
};

// One message per broken invariant; empty iff the model is well formed.
std::vector<std::string> validate_model(const KripkeModel& m);

// M, w, sigma |= f. Throws ModelError if sigma is not relevant at w for a free variable of f.
bool check(const KripkeModel& m, const WorldId& w, const Assignment& sigma, const Formula& f);

// Canonical JSON: keys sorted, lists sorted, two-space indentation.
std::string model_to_json(const KripkeModel& m);
KripkeModel model_from_json(std::string_view text);
KripkeModel read_model_file(const std::string& path);

} // namespace foml

#endif // FOML_KRIPKE_HPP_
