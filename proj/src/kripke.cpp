#include "foml/kripke.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "foml/syntax.hpp"
#include "json.hpp"

namespace foml {

using nlohmann::ordered_json;

std::vector<WorldId> KripkeModel::successors(const WorldId& w) const {
  std::vector<WorldId> out;
  for (auto it = edges.lower_bound({w, WorldId{}}); it != edges.end() && it->first == w; ++it) out.push_back(it->second);
  return out;
}

const std::set<Element>& KripkeModel::delta(const WorldId& w) const {
  static const std::set<Element> empty;
  auto it = local_domain.find(w);
  return it == local_domain.end() ? empty : it->second;
}

bool KripkeModel::holds(const WorldId& w, const std::string& pred, const Tuple& args) const {
  auto wi = valuation.find(w);
  if (wi == valuation.end()) return false;
  auto pi = wi->second.find(pred);
  return pi != wi->second.end() && pi->second.contains(args);
}

std::vector<std::string> validate_model(const KripkeModel& m) {
  std::vector<std::string> out;
  if (m.worlds.empty()) out.push_back("model has no worlds");
  for (const auto& w : m.worlds) {
    auto it = m.local_domain.find(w);
    if (it == m.local_domain.end() || it->second.empty()) {
      out.push_back("world " + w + " has an empty local domain");
      continue;
    }
    for (const auto& e : it->second) {
      if (!m.domain.contains(e)) out.push_back("element " + e + " of delta(" + w + ") is not in the domain");
    }
  }
  for (const auto& [w, d] : m.local_domain) {
    if (!m.worlds.contains(w)) out.push_back("local domain given for unknown world " + w);
  }
  for (const auto& [w, v] : m.edges) {
    if (!m.worlds.contains(w) || !m.worlds.contains(v)) {
      out.push_back("edge " + w + " -> " + v + " mentions an unknown world");
      continue;
    }
    const auto& dw = m.delta(w);
    const auto& dv = m.delta(v);
    for (const auto& e : dw) {
      if (!dv.contains(e)) out.push_back("monotonicity: " + e + " in delta(" + w + ") but not in delta(" + v + ")");
    }
  }
  std::map<std::string, std::size_t> arity;
  for (const auto& [w, preds] : m.valuation) {
    if (!m.worlds.contains(w)) {
      out.push_back("valuation given for unknown world " + w);
      continue;
    }
    const auto& dw = m.delta(w);
    for (const auto& [p, tuples] : preds) {
      for (const auto& t : tuples) {
        auto [it, ins] = arity.emplace(p, t.size());
        if (!ins && it->second != t.size()) out.push_back("predicate " + p + " used with two arities");
        for (const auto& e : t) {
          if (!dw.contains(e)) out.push_back("valuation of " + p + " at " + w + " uses " + e + " outside delta(" + w + ")");
        }
      }
    }
  }
  return out;
}

namespace {

bool eval(const KripkeModel& m, const WorldId& w, Assignment& sigma, const Formula& f) {
  switch (f.op()) {
    case Op::Pred: {
      Tuple t;
      t.reserve(f.args().size());
      for (const auto& v : f.args()) t.push_back(sigma.at(v));
      return m.holds(w, f.symbol(), t);
    }
    case Op::Not: return !eval(m, w, sigma, f.body());
    case Op::And: return eval(m, w, sigma, f.lhs()) && eval(m, w, sigma, f.rhs());
    case Op::Or: return eval(m, w, sigma, f.lhs()) || eval(m, w, sigma, f.rhs());
    case Op::Implies: return !eval(m, w, sigma, f.lhs()) || eval(m, w, sigma, f.rhs());
    case Op::Iff: return eval(m, w, sigma, f.lhs()) == eval(m, w, sigma, f.rhs());
    case Op::Exists: case Op::Forall: {
      const bool want = f.op() == Op::Exists;
      auto saved = sigma.find(f.symbol());
      std::optional<Element> old;
      if (saved != sigma.end()) old = saved->second;
      bool result = !want;
      for (const auto& d : m.delta(w)) {
        sigma[f.symbol()] = d;
        if (eval(m, w, sigma, f.body()) == want) {
          result = want;
          break;
        }
      }
      if (old) {
        sigma[f.symbol()] = *old;
      } else {
        sigma.erase(f.symbol());
      }
      return result;
    }
    case Op::Box:
      for (const auto& v : m.successors(w)) {
        if (!eval(m, v, sigma, f.body())) return false;
      }
      return true;
    case Op::Diamond:
      for (const auto& v : m.successors(w)) {
        if (eval(m, v, sigma, f.body())) return true;
      }
      return false;
  }
  return false;
}

ordered_json to_ordered(const KripkeModel& m) {
  ordered_json j = ordered_json::object();
  ordered_json delta = ordered_json::object();
  for (const auto& w : m.worlds) {
    ordered_json d = ordered_json::array();
    for (const auto& e : m.delta(w)) d.push_back(e);
    delta[w] = d;
  }
  j["delta"] = delta;
  j["domain"] = m.domain;
  ordered_json edges = ordered_json::array();
  for (const auto& [a, b] : m.edges) edges.push_back({a, b});
  j["edges"] = edges;
  ordered_json val = ordered_json::object();
  for (const auto& w : m.worlds) {
    ordered_json entries = ordered_json::array();
    auto it = m.valuation.find(w);
    if (it != m.valuation.end()) {
      for (const auto& [p, tuples] : it->second) {
        for (const auto& t : tuples) entries.push_back({p, t});
      }
    }
    val[w] = entries;
  }
  j["valuation"] = val;
  j["worlds"] = m.worlds;
  return j;
}

} // namespace

bool check(const KripkeModel& m, const WorldId& w, const Assignment& sigma, const Formula& f) {
  if (!m.worlds.contains(w)) throw ModelError("unknown world " + w);
  const auto& dw = m.delta(w);
  for (const auto& v : free_vars(f)) {
    auto it = sigma.find(v);
    if (it == sigma.end()) throw ModelError("assignment does not bind free variable " + v);
    if (!dw.contains(it->second)) {
      throw ModelError("assignment not relevant at " + w + ": " + v + " -> " + it->second + " is outside the local domain");
    }
  }
  Assignment s = sigma;
  return eval(m, w, s, f);
}

std::string model_to_json(const KripkeModel& m) { return to_ordered(m).dump(2) + "\n"; }

KripkeModel model_from_json(std::string_view text) {
  KripkeModel m;
  try {
    auto j = ordered_json::parse(text);
    for (const auto& w : j.at("worlds")) m.worlds.insert(w.get<std::string>());
    for (const auto& e : j.at("domain")) m.domain.insert(e.get<std::string>());
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ModelError("edge must be a pair of world names");
      m.edges.emplace(e[0].get<std::string>(), e[1].get<std::string>());
    }
    for (const auto& [w, d] : j.at("delta").items()) {
      auto& set = m.local_domain[w];
      for (const auto& e : d) set.insert(e.get<std::string>());
    }
    if (j.contains("valuation")) {
      for (const auto& [w, entries] : j.at("valuation").items()) {
        auto& preds = m.valuation[w];
        for (const auto& entry : entries) {
          if (!entry.is_array() || entry.size() != 2) throw ModelError("valuation entry must be [pred, [args]]");
          preds[entry[0].get<std::string>()].insert(entry[1].get<Tuple>());
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed model JSON: ") + e.what());
  }
  return m;
}

KripkeModel read_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

} // namespace foml
