#include "foml/extraction.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>

#include "json.hpp"

namespace foml {

std::string to_string(ExtensionStatus s) {
  return s == ExtensionStatus::Satisfied ? "Satisfied" : "ResidualViolations";
}

std::vector<const TableauNode*> last_nodes(const Tableau& t) {
  std::map<std::string, std::pair<std::size_t, const TableauNode*>> last;
  for_each_node(t.root, [&](const TableauNode& n, std::size_t d) {
    auto& slot = last[to_string(n.world)];
    if (!slot.second || d > slot.first) slot = {d, &n};
  });
  std::vector<const TableauNode*> out;
  for (const auto& [w, p] : last) out.push_back(p.second);
  return out;
}

KripkeModel extract_model(const Tableau& t) {
  KripkeModel m;
  for_each_node(t.root, [&](const TableauNode& n, std::size_t) {
    if (n.children.empty()) {
      for (const auto& f : n.gamma) {
        if (!f.is_literal()) throw TableauError("tableau is not saturated at " + to_string(n.world));
      }
    }
    for (const auto& c : n.children) {
      if (c.rule == Rule::Diamond) m.edges.emplace(to_string(n.world), to_string(c.world));
    }
  });
  for (const TableauNode* n : last_nodes(t)) {
    if (is_closed(n->gamma)) throw TableauError("tableau is not open at " + to_string(n->world));
    const WorldId w = to_string(n->world);
    m.worlds.insert(w);
    m.local_domain[w] = std::set<Element>(n->s.begin(), n->s.end());
    m.domain.insert(n->s.begin(), n->s.end());
    for (const auto& f : n->gamma) {
      if (f.is_pred()) m.valuation[w][f.symbol()].insert(Tuple(f.args().begin(), f.args().end()));
    }
  }
  return m;
}

namespace {

Assignment identity_on(const VarSet& vs) {
  Assignment a;
  for (const auto& v : vs) a[v] = v;
  return a;
}

} // namespace

std::vector<LeafViolation> find_leaf_violations(const Tableau& t, const KripkeModel& m) {
  std::vector<LeafViolation> out;
  for_each_node(t.root, [&](const TableauNode& n, std::size_t) {
    if (n.rule != Rule::NestedForall || n.forest.kind != ForestKind::Forest || !n.principal) return;
    const Var x = n.principal->symbol();
    const SkolemForest& f = *n.forest.forest;
    for (const auto& z : f.leaves()) {
      for (const auto& e : f.label.at(z).existentials()) {
        Formula g = substitute(e, x, z);
        if (!check(m, to_string(n.world), identity_on(free_vars(g)), g)) out.push_back({n.world, z, g, f.depth(z)});
      }
    }
  });
  std::sort(out.begin(), out.end(), [](const LeafViolation& a, const LeafViolation& b) {
    return std::tie(a.depth, a.world, a.leaf) < std::tie(b.depth, b.world, b.leaf);
  });
  return out;
}

namespace {

// 0 equal, 1 parent, 2 child, 3 proper ancestor, 4 proper descendant, 5 unrelated.
int relation(const SkolemForest& f, const Var& a, const Var& b) {
  if (a == b) return 0;
  auto pb = f.path(b);
  auto pa = f.path(a);
  if (std::find(pb.begin(), pb.end(), a) != pb.end()) return pa.size() + 1 == pb.size() ? 1 : 3;
  if (std::find(pa.begin(), pa.end(), b) != pa.end()) return pb.size() + 1 == pa.size() ? 2 : 4;
  return 5;
}

// Substitutions sending the forest variables of a formula over the extended forest onto
// old forest nodes with the same labels and the same pairwise relations.
class Mimic {
public:
  Mimic(const SkolemForest& old, const SkolemForest& ext) : old_(old), ext_(ext), order_(old.preorder()) {}

  bool involves_new(const Formula& f) const {
    for (const auto& v : free_vars(f)) {
      if (ext_.contains(v) && !old_.contains(v)) return true;
    }
    return false;
  }

  // Calls fn for each substitution, identity-preferring order, until fn returns true.
  bool each(const Formula& f, const std::function<bool(const std::map<Var, Var>&)>& fn) const {
    std::vector<Var> vars;
    for (const auto& v : free_vars(f)) {
      if (ext_.contains(v)) vars.push_back(v);
    }
    std::map<Var, Var> mu;
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
      if (i == vars.size()) return fn(mu);
      const Var& v = vars[i];
      std::vector<Var> cands;
      if (old_.contains(v)) cands.push_back(v);
      for (const auto& o : order_) {
        if (o != v) cands.push_back(o);
      }
      for (const auto& o : cands) {
        if (!(old_.label.at(o) == ext_.label.at(v))) continue;
        bool ok = true;
        for (std::size_t j = 0; j < i && ok; ++j) {
          const Var& u = vars[j];
          ok = relation(ext_, u, v) == relation(old_, mu[u], o);
        }
        if (!ok) continue;
        mu[v] = o;
        if (rec(i + 1)) return true;
        mu.erase(v);
      }
      return false;
    };
    return rec(0);
  }

private:
  const SkolemForest& old_;
  const SkolemForest& ext_;
  std::vector<Var> order_;
};

struct OldGroup {
  std::string segment;
  std::vector<std::string> keys;
};

struct OldForest {
  Formula nested;
  SkolemForest forest;
};

struct Hints {
  std::map<std::pair<std::string, std::string>, int> or_at;
  std::map<std::string, int> or_any;
  std::map<std::string, OldForest> forests;
  std::map<std::string, std::vector<OldGroup>> groups;

  explicit Hints(const TableauNode& tau) {
    for_each_node(tau, [&](const TableauNode& n, std::size_t d) {
      const std::string w = to_string(n.world);
      for (const auto& c : n.children) {
        if (c.rule == Rule::Or && c.principal) {
          const int choice = c.gamma.contains(c.principal->lhs()) ? 0 : 1;
          const std::string k = alpha_key(*c.principal);
          or_at.emplace(std::make_pair(w, k), choice);
          or_any.emplace(k, choice);
        }
        if (c.rule == Rule::Diamond) {
          OldGroup g{c.world.back(), {}};
          for (const auto& s : c.diamond_sources) g.keys.push_back(alpha_key(s));
          groups[w].push_back(std::move(g));
        }
      }
      if (d > 0 && n.rule == Rule::NestedForall && n.principal && n.forest.kind == ForestKind::Forest) {
        forests.emplace(w, OldForest{*n.principal, *n.forest.forest});
      }
    });
  }

  std::optional<int> or_lookup(const std::string& w, const std::string& k) const {
    auto it = or_at.find({w, k});
    if (it != or_at.end()) return it->second;
    auto jt = or_any.find(k);
    if (jt != or_any.end()) return jt->second;
    return std::nullopt;
  }
};

std::size_t numeric_or_zero(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) return 0;
  return std::stoul(s);
}

ChoiceHooks make_hooks(const Hints& hints, const Mimic& mimic, const std::map<Var, Var>& copy_of, bool merge) {
  ChoiceHooks h;
  auto cache = std::make_shared<std::map<std::pair<std::string, std::string>, std::optional<int>>>();
  h.or_order = [&hints, &mimic, cache](const WorldName& world, const FormulaSet&, const Formula& disj) -> std::vector<int> {
    const std::string w = to_string(world);
    const std::string k = alpha_key(disj);
    auto [it, fresh] = cache->try_emplace({w, k});
    if (fresh) {
      it->second = hints.or_lookup(w, k);
      if (!it->second && mimic.involves_new(disj)) {
        mimic.each(disj, [&](const std::map<Var, Var>& mu) {
          it->second = hints.or_lookup(w, alpha_key(substitute(disj, mu)));
          return it->second.has_value();
        });
      }
    }
    if (!it->second) return {};
    return {*it->second, 1 - *it->second};
  };

  h.forests = [&hints, &copy_of](const WorldName& world, const FormulaSet& gamma, const VarSet& s, FreshVars& fresh) {
    std::vector<SkolemForest> out;
    auto it = hints.forests.find(to_string(world));
    if (it == hints.forests.end()) return out;
    auto nf = unique_nested_forall(gamma);
    if (!nf) return out;
    const OldForest& of = it->second;
    const auto old_atoms = enumerate_atoms(of.nested.body(), of.nested.symbol());
    const auto new_atoms = enumerate_atoms(nf->body, nf->x);
    if (old_atoms.size() != new_atoms.size()) return out;
    auto relabel = [&](const Atom& a) {
      auto pos = std::find(old_atoms.begin(), old_atoms.end(), a) - old_atoms.begin();
      return new_atoms.at(pos);
    };
    SkolemForest f;
    f.roots.assign(s.begin(), s.end());
    std::function<void(const Var&, const Var&)> copy = [&](const Var& from, const Var& to) {
      f.label.emplace(to, relabel(of.forest.label.at(from)));
      for (const auto& c : of.forest.kids(from)) {
        Var n = fresh.next();
        f.parent[n] = to;
        f.children[to].push_back(n);
        copy(c, n);
      }
    };
    if (of.forest.roots.empty()) return out;
    for (const auto& r : f.roots) {
      Var origin = of.forest.roots.front();
      if (of.forest.contains(r) && !of.forest.parent.contains(r)) {
        origin = r;
      } else if (auto c = copy_of.find(r); c != copy_of.end() && of.forest.contains(c->second) && !of.forest.parent.contains(c->second)) {
        origin = c->second;
      }
      copy(origin, r);
    }
    if (validate_forest(f, gamma, s).empty()) out.push_back(std::move(f));
    return out;
  };

  h.diamonds = [&hints, &mimic, merge](const WorldName& world, const FormulaSet&, const std::vector<Formula>& diamonds) {
    std::vector<DiamondGroup> out;
    auto it = hints.groups.find(to_string(world));
    if (it == hints.groups.end()) return out;
    const auto& old = it->second;
    std::vector<DiamondGroup> groups;
    std::size_t next = 0;
    for (const auto& g : old) {
      groups.push_back({g.segment, {}});
      next = std::max(next, numeric_or_zero(g.segment) + 1);
    }
    auto find_group = [&](const std::string& key) -> std::optional<std::size_t> {
      for (std::size_t i = 0; i < old.size(); ++i) {
        if (std::find(old[i].keys.begin(), old[i].keys.end(), key) != old[i].keys.end()) return i;
      }
      return std::nullopt;
    };
    auto nested = [](const Formula& d) { return d.body().op() == Op::Forall && is_nested_forall(d.body()); };
    std::vector<DiamondGroup> extra;
    for (const auto& d : diamonds) {
      std::optional<std::size_t> gi = find_group(alpha_key(d));
      if (!gi && merge && !nested(d) && mimic.involves_new(d)) {
        mimic.each(d, [&](const std::map<Var, Var>& mu) {
          gi = find_group(alpha_key(substitute(d, mu)));
          return gi.has_value();
        });
      }
      if (gi) {
        auto& srcs = groups[*gi].sources;
        if (nested(d) && std::any_of(srcs.begin(), srcs.end(), nested)) gi.reset();
        else srcs.push_back(d);
      }
      if (!gi) extra.push_back({std::to_string(next++), {d}});
    }
    for (auto& g : groups) {
      if (!g.sources.empty()) out.push_back(std::move(g));
    }
    for (auto& g : extra) out.push_back(std::move(g));
    return out;
  };
  return h;
}

// Path of child indices from the root to the nested-forall node of `world`.
std::optional<std::vector<std::size_t>> locate(const TableauNode& n, const WorldName& world, std::vector<std::size_t>& path) {
  if (n.rule == Rule::NestedForall && n.world == world) return path;
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    path.push_back(i);
    if (auto p = locate(n.children[i], world, path)) return p;
    path.pop_back();
  }
  return std::nullopt;
}

} // namespace

Extension extend_tableau(const Tableau& t, const WorldName& world, const Var& z, const SearchLimits& limits) {
  std::vector<std::size_t> scratch;
  auto path = locate(t.root, world, scratch);
  if (!path || path->empty()) throw TableauError("no nested-forall node at world " + to_string(world));

  Tableau out = t;
  TableauNode* parent = &out.root;
  for (std::size_t i = 0; i + 1 < path->size(); ++i) parent = &parent->children[(*path)[i]];
  TableauNode& tau = parent->children[path->back()];
  const SkolemForest& old_forest = *tau.forest.forest;

  FreshVars fresh = tableau_fresh(t);
  std::map<Var, Var> copy_of;
  SkolemForest ext = extend_forest(old_forest, z, fresh, &copy_of);

  std::vector<Var> added;
  for (const auto& v : ext.preorder()) {
    if (!old_forest.contains(v)) added.push_back(v);
  }

  const Hints hints(tau);
  const Mimic mimic(old_forest, ext);
  for (bool merge : {true, false}) {
    TableauNode fresh_tau;
    fresh_tau.world = tau.world;
    fresh_tau.rule = Rule::NestedForall;
    fresh_tau.principal = tau.principal;
    fresh_tau.gamma = expand_forest(ext, parent->gamma, fresh);
    fresh_tau.s = ext.nodes();
    fresh_tau.forest = ForestState::of(ext);
    ChoiceHooks hooks = make_hooks(hints, mimic, copy_of, merge);
    if (search_from(fresh_tau, fresh, limits, hooks) == Verdict::Sat) {
      tau = std::move(fresh_tau);
      return Extension{std::move(out), std::move(added), merge};
    }
  }
  throw TableauError("extension at " + to_string(world) + " for " + z + " could not be rebuilt");
}

bool extends_model(const KripkeModel& a, const KripkeModel& b) {
  for (const auto& w : a.worlds) {
    if (!b.worlds.contains(w)) return false;
    const auto& da = a.delta(w);
    const auto& db = b.delta(w);
    if (!std::includes(db.begin(), db.end(), da.begin(), da.end())) return false;
    auto va = a.valuation.find(w);
    if (va == a.valuation.end()) continue;
    for (const auto& [p, tuples] : va->second) {
      for (const auto& tu : tuples) {
        if (!b.holds(w, p, tu)) return false;
      }
    }
  }
  for (const auto& e : a.edges) {
    if (!b.edges.contains(e)) return false;
  }
  return true;
}

ExtensionOutcome iterate_extensions(const Formula& theta, const Tableau& t, std::size_t k, const SearchLimits& limits) {
  (void)theta;
  ExtensionOutcome res{extract_model(t), {}, ExtensionStatus::ResidualViolations, t, {}};
  for (std::size_t i = 0;; ++i) {
    res.model = extract_model(res.tableau);
    res.trace.snapshots.push_back(res.model);
    if (check(res.model, "r", identity_on(free_vars(res.tableau.theta)), res.tableau.theta)) {
      res.status = ExtensionStatus::Satisfied;
      res.violations.clear();
      return res;
    }
    res.violations = find_leaf_violations(res.tableau, res.model);
    if (res.violations.empty()) throw TableauError("extracted model fails the formula but no leaf violation was found");
    if (i == k) return res;
    const LeafViolation& v = res.violations.front();
    Extension ext = extend_tableau(res.tableau, v.world, v.leaf, limits);
    res.trace.steps.push_back({i, v.world, v.leaf, ext.fresh_vars});
    res.tableau = std::move(ext.tableau);
  }
}

std::string trace_to_jsonl(const ExtensionTrace& trace) {
  using nlohmann::ordered_json;
  std::string out;
  for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
    ordered_json j = ordered_json::object();
    j["iteration"] = i;
    if (i > 0 && i - 1 < trace.steps.size()) {
      const auto& s = trace.steps[i - 1];
      j["world"] = to_string(s.world);
      j["leaf"] = s.leaf;
      j["fresh"] = s.fresh_vars;
    }
    j["model"] = ordered_json::parse(model_to_json(trace.snapshots[i]));
    out += j.dump() + "\n";
  }
  return out;
}

} // namespace foml
