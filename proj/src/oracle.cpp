#include "foml/oracle.hpp"

#include <cstdlib>
#include <functional>
#include <optional>
#include <tuple>
#include <map>
#include <string>
#include <vector>

#include "foml/syntax.hpp"

namespace foml {

namespace {

struct Frame {
  std::vector<int> parent; // parent[0] = -1
  std::vector<std::vector<int>> kids;
};

std::vector<Frame> frames(int max_worlds, int max_depth) {
  std::vector<Frame> out;
  for (int n = 1; n <= max_worlds; ++n) {
    std::vector<int> p(n, -1);
    std::function<void(int)> rec = [&](int i) {
      if (i == n) {
        Frame f;
        f.parent = p;
        f.kids.assign(n, {});
        for (int j = 1; j < n; ++j) f.kids[p[j]].push_back(j);
        out.push_back(std::move(f));
        return;
      }
      for (int q = (i == 1 ? 0 : p[i - 1]); q < i; ++q) {
        int depth = 1;
        for (int a = q; a != 0; a = p[a]) ++depth;
        if (depth > max_depth) continue;
        p[i] = q;
        rec(i + 1);
      }
    };
    rec(1);
  }
  return out;
}

class Sat {
public:
  int new_var() { return ++nvars_; }
  void add(std::vector<int> c) { clauses_.push_back(std::move(c)); }

  // Returns assignment (index by var) or empty on UNSAT. `budget` is decremented per decision.
  std::optional<std::vector<signed char>> solve(std::size_t& budget) {
    std::vector<signed char> val(nvars_ + 1, 0);
    if (dpll(val, budget)) return val;
    return std::nullopt;
  }

private:
  int nvars_ = 0;
  std::vector<std::vector<int>> clauses_;

  static int value(const std::vector<signed char>& v, int lit) {
    int x = v[std::abs(lit)];
    return lit > 0 ? x : -x;
  }

  bool propagate(std::vector<signed char>& val, std::vector<int>& trail) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& c : clauses_) {
        int unassigned = 0, last = 0;
        bool sat = false;
        for (int l : c) {
          int v = value(val, l);
          if (v > 0) {
            sat = true;
            break;
          }
          if (v == 0) {
            ++unassigned;
            last = l;
          }
        }
        if (sat) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          val[std::abs(last)] = last > 0 ? 1 : -1;
          trail.push_back(std::abs(last));
          changed = true;
        }
      }
    }
    return true;
  }

  bool dpll(std::vector<signed char>& val, std::size_t& budget) {
    std::vector<int> trail;
    if (!propagate(val, trail)) {
      for (int v : trail) val[v] = 0;
      return false;
    }
    int pick = 0;
    for (const auto& c : clauses_) {
      bool sat = false;
      int first = 0;
      for (int l : c) {
        int v = value(val, l);
        if (v > 0) {
          sat = true;
          break;
        }
        if (v == 0 && (first == 0 || std::abs(l) < std::abs(first))) first = l;
      }
      if (!sat && first != 0 && (pick == 0 || std::abs(first) < pick)) pick = std::abs(first);
    }
    if (pick == 0) return true;
    if (budget == 0) throw OracleResourceError("oracle: DPLL decision budget exhausted");
    --budget;
    for (signed char choice : {static_cast<signed char>(-1), static_cast<signed char>(1)}) {
      val[pick] = choice;
      if (dpll(val, budget)) return true;
      val[pick] = 0;
    }
    for (int v : trail) val[v] = 0;
    return false;
  }
};

class Grounder {
public:
  Grounder(const Frame& fr, const std::vector<std::vector<Element>>& delta, Sat& sat)
      : fr_(fr), delta_(delta), sat_(sat) {
    true_ = sat_.new_var();
    sat_.add({true_});
  }

  int ground(const Formula& f, int w, std::map<Var, Element>& sigma) {
    switch (f.op()) {
      case Op::Pred: return atom(w, f, sigma);
      case Op::Not: return -ground(f.body(), w, sigma);
      case Op::And: return junction(true, {ground(f.lhs(), w, sigma), ground(f.rhs(), w, sigma)});
      case Op::Or: return junction(false, {ground(f.lhs(), w, sigma), ground(f.rhs(), w, sigma)});
      case Op::Exists: case Op::Forall: {
        std::vector<int> parts;
        auto saved = sigma.find(f.symbol());
        std::optional<Element> old;
        if (saved != sigma.end()) old = saved->second;
        for (const auto& d : delta_[w]) {
          sigma[f.symbol()] = d;
          parts.push_back(ground(f.body(), w, sigma));
        }
        if (old) {
          sigma[f.symbol()] = *old;
        } else {
          sigma.erase(f.symbol());
        }
        return junction(f.op() == Op::Forall, parts);
      }
      case Op::Box: case Op::Diamond: {
        std::vector<int> parts;
        for (int v : fr_.kids[w]) parts.push_back(ground(f.body(), v, sigma));
        return junction(f.op() == Op::Box, parts);
      }
      default:
        throw FormulaError("oracle expects NNF input");
    }
  }

  const std::map<std::tuple<int, std::string, Tuple>, int>& atoms() const { return atoms_; }

private:
  const Frame& fr_;
  const std::vector<std::vector<Element>>& delta_;
  Sat& sat_;
  int true_ = 0;
  std::map<std::tuple<int, std::string, Tuple>, int> atoms_;

  int atom(int w, const Formula& f, const std::map<Var, Element>& sigma) {
    Tuple t;
    for (const auto& a : f.args()) t.push_back(sigma.at(a));
    auto key = std::make_tuple(w, f.symbol(), std::move(t));
    auto it = atoms_.find(key);
    if (it != atoms_.end()) return it->second;
    int v = sat_.new_var();
    atoms_.emplace(std::move(key), v);
    return v;
  }

  // Conjunction (and=true) or disjunction with constant folding; one-directional encoding.
  int junction(bool conj, std::vector<int> parts) {
    const int unit = conj ? true_ : -true_;
    std::vector<int> kept;
    for (int p : parts) {
      if (p == unit) continue;
      if (p == -unit) return -unit;
      kept.push_back(p);
    }
    if (kept.empty()) return unit;
    if (kept.size() == 1) return kept[0];
    int a = sat_.new_var();
    if (conj) {
      for (int p : kept) sat_.add({-a, p});
    } else {
      std::vector<int> c{-a};
      c.insert(c.end(), kept.begin(), kept.end());
      sat_.add(std::move(c));
    }
    return a;
  }
};

bool advance(std::vector<std::size_t>& idx, std::size_t radix) {
  for (std::size_t k = idx.size(); k-- > 0;) {
    if (++idx[k] < radix) return true;
    idx[k] = 0;
  }
  return false;
}

} // namespace

std::optional<OracleModel> bounded_model_search(const Formula& phi_in, const OracleBounds& b) {
  if (b.max_worlds < 1 || b.max_domain < 1 || b.tree_depth < 0) throw OracleResourceError("oracle bounds must be positive");
  const Formula phi = to_nnf(phi_in);
  const VarSet fvs = free_vars(phi);
  const std::vector<Var> fv(fvs.begin(), fvs.end());
  std::vector<Element> elems;
  for (int i = 0; i < b.max_domain; ++i) elems.push_back("a" + std::to_string(i));
  const unsigned full = (1u << b.max_domain) - 1;

  std::size_t candidates = 0;
  std::size_t budget = b.max_decisions;

  for (const Frame& fr : frames(b.max_worlds, b.tree_depth)) {
    const int n = static_cast<int>(fr.parent.size());
    std::vector<unsigned> mask(n, 0);
    std::optional<OracleModel> found;

    std::function<bool(int)> assign_delta = [&](int i) -> bool {
      if (i == n) {
        std::vector<std::vector<Element>> delta(n);
        for (int w = 0; w < n; ++w) {
          for (int e = 0; e < b.max_domain; ++e) {
            if (mask[w] & (1u << e)) delta[w].push_back(elems[e]);
          }
        }
        // free-variable assignments over delta(root), odometer order
        std::vector<std::size_t> idx(fv.size(), 0);
        for (;;) {
          if (++candidates > b.max_candidates) throw OracleResourceError("oracle: candidate cap exceeded");
          std::map<Var, Element> sigma;
          for (std::size_t k = 0; k < fv.size(); ++k) sigma[fv[k]] = delta[0][idx[k]];
          Sat sat;
          Grounder g(fr, delta, sat);
          auto s2 = sigma;
          int top = g.ground(phi, 0, s2);
          sat.add({top});
          if (auto val = sat.solve(budget)) {
            OracleModel om;
            auto& m = om.model;
            for (int w = 0; w < n; ++w) {
              WorldId name = "w" + std::to_string(w);
              m.worlds.insert(name);
              m.local_domain[name] = std::set<Element>(delta[w].begin(), delta[w].end());
              m.domain.insert(delta[w].begin(), delta[w].end());
              if (w > 0) m.edges.emplace("w" + std::to_string(fr.parent[w]), name);
            }
            for (const auto& [key, v] : g.atoms()) {
              if ((*val)[v] > 0) {
                m.valuation["w" + std::to_string(std::get<0>(key))][std::get<1>(key)].insert(std::get<2>(key));
              }
            }
            om.world = "w0";
            om.sigma = sigma;
            found = std::move(om);
            return true;
          }
          if (!advance(idx, delta[0].size())) break;
        }
        return false;
      }
      if (i == 0) {
        for (int m0 = 1; m0 <= b.max_domain; ++m0) {
          mask[0] = (1u << m0) - 1;
          if (assign_delta(1)) return true;
        }
        return false;
      }
      const unsigned base = mask[fr.parent[i]];
      const unsigned free_bits = full & ~base;
      // supersets of the parent's domain, smallest additions first
      for (unsigned sub = 0;; sub = (sub - free_bits) & free_bits) {
        mask[i] = base | sub;
        if (assign_delta(i + 1)) return true;
        if (sub == free_bits) break;
      }
      return false;
    };
    if (assign_delta(0)) return found;
  }
  return std::nullopt;
}

} // namespace foml
