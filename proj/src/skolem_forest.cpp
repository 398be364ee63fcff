#include "foml/skolem_forest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace foml {

VarSet SkolemForest::nodes() const {
  VarSet out;
  for (const auto& [v, a] : label) out.insert(v);
  return out;
}

bool SkolemForest::is_leaf(const Var& v) const { return kids(v).empty(); }

const std::vector<Var>& SkolemForest::kids(const Var& v) const {
  static const std::vector<Var> none;
  auto it = children.find(v);
  return it == children.end() ? none : it->second;
}

std::vector<Var> SkolemForest::path(const Var& v) const {
  std::vector<Var> out{v};
  for (auto it = parent.find(v); it != parent.end(); it = parent.find(it->second)) {
    out.push_back(it->second);
    if (out.size() > label.size() + 1) throw ForestError("forest parent map has a cycle at " + v);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Var> SkolemForest::preorder() const {
  std::vector<Var> out;
  std::function<void(const Var&)> rec = [&](const Var& v) {
    out.push_back(v);
    for (const auto& c : kids(v)) rec(c);
  };
  for (const auto& r : roots) rec(r);
  return out;
}

std::vector<Var> SkolemForest::leaves() const {
  std::vector<Var> out;
  for (const auto& v : preorder()) {
    if (is_leaf(v)) out.push_back(v);
  }
  return out;
}

std::optional<NestedForall> unique_nested_forall(const FormulaSet& gamma) {
  auto nf = nested_foralls(gamma);
  if (nf.size() > 1) throw ForestError("more than one nested universal formula: " + to_string(nf[0]) + ", " + to_string(nf[1]));
  if (nf.empty()) return std::nullopt;
  return NestedForall{nf[0], nf[0].symbol(), nf[0].body()};
}

namespace {

NestedForall require_nested(const FormulaSet& gamma) {
  auto nf = unique_nested_forall(gamma);
  if (!nf) throw ForestError("formula set has no nested universal formula");
  return *nf;
}

std::size_t count_label(const SkolemForest& f, const std::vector<Var>& path, std::size_t upto, const Atom& a) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < upto; ++i) {
    if (f.label.at(path[i]) == a) ++n;
  }
  return n;
}

// Binders of f all renamed to fresh names.
Formula freshen(const Formula& f, FreshVars& fresh) { return clean_rename(f, bound_vars(f), fresh); }

} // namespace

std::vector<std::string> validate_forest(const SkolemForest& f, const FormulaSet& gamma, const VarSet& s) {
  const NestedForall nf = require_nested(gamma);
  const auto atoms = enumerate_atoms(nf.body, nf.x);
  std::vector<std::string> out;

  VarSet roots(f.roots.begin(), f.roots.end());
  if (roots.size() != f.roots.size()) out.push_back("duplicate root");
  if (roots != s) out.push_back("roots differ from S: roots " + std::to_string(roots.size()) + ", S " + std::to_string(s.size()));

  for (const auto& r : f.roots) {
    if (!f.contains(r)) out.push_back("root " + r + " has no label");
    if (f.parent.contains(r)) out.push_back("root " + r + " has a parent");
  }
  for (const auto& [c, p] : f.parent) {
    if (!f.contains(c) || !f.contains(p)) {
      out.push_back("edge " + p + " -> " + c + " mentions an unlabelled node");
      continue;
    }
    const auto& ks = f.kids(p);
    if (std::count(ks.begin(), ks.end(), c) != 1) out.push_back("node " + c + " is not listed once among the children of " + p);
  }
  for (const auto& [p, ks] : f.children) {
    for (const auto& c : ks) {
      auto it = f.parent.find(c);
      if (it == f.parent.end() || it->second != p) out.push_back("child " + c + " of " + p + " does not point back to it");
    }
  }
  if (!out.empty()) return out;

  VarSet reached;
  try {
    for (const auto& v : f.preorder()) {
      if (!reached.insert(v).second) out.push_back("node " + v + " reached twice");
    }
  } catch (const ForestError& e) {
    out.push_back(e.what());
    return out;
  }
  for (const auto& [v, a] : f.label) {
    if (!reached.contains(v)) out.push_back("node " + v + " is not reachable from a root");
  }
  if (!out.empty()) return out;

  const VarSet gv = all_vars(gamma);
  for (const auto& v : f.preorder()) {
    const Atom& a = f.label.at(v);
    if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) out.push_back("label of " + v + " is not an atom");
    const std::size_t ex = a.existentials().size();
    if (f.is_leaf(v)) {
      if (ex > 0) {
        auto p = f.path(v);
        if (count_label(f, p, p.size() - 1, a) < 2) out.push_back("leaf " + v + " needs a witness but no two ancestors share its label");
      }
    } else if (f.kids(v).size() != ex) {
      out.push_back("node " + v + " has " + std::to_string(f.kids(v).size()) + " children for " + std::to_string(ex) + " existentials");
    }
    if (!roots.contains(v) && gv.contains(v)) out.push_back("non-root node " + v + " already occurs in the formula set");
  }
  return out;
}

FormulaSet expand_forest(const SkolemForest& f, const FormulaSet& gamma, FreshVars& fresh) {
  const NestedForall nf = require_nested(gamma);
  fresh.reserve(all_vars(gamma));
  fresh.reserve(f.nodes());
  FormulaSet out = gamma;
  out.erase(nf.formula);
  for (const auto& z : f.preorder()) {
    const Atom& a = f.label.at(z);
    std::size_t ex_index = 0;
    const bool leaf = f.is_leaf(z);
    for (const auto& beta : a.obligations()) {
      if (beta.op() != Op::Exists) {
        out.insert(freshen(substitute(beta, nf.x, z), fresh));
        continue;
      }
      const std::size_t i = ex_index++;
      if (leaf) continue;
      const Var& child = f.kids(z).at(i);
      Formula body = substitute(beta.body(), {{nf.x, z}, {beta.symbol(), child}});
      out.insert(Formula::exists(child, freshen(body, fresh)));
    }
  }
  return out;
}

FormulaSet expand_forest(const SkolemForest& f, const FormulaSet& gamma) {
  FreshVars fresh;
  return expand_forest(f, gamma, fresh);
}

double ForestBound::value() const {
  const double b = static_cast<double>(std::max<std::size_t>(branching, 2));
  return static_cast<double>(roots) * std::pow(b, 2.0 * static_cast<double>(atoms) + 2.0);
}

ForestBound forest_bound(const FormulaSet& gamma, const VarSet& s) {
  const NestedForall nf = require_nested(gamma);
  const auto atoms = enumerate_atoms(nf.body, nf.x);
  ForestBound b;
  b.roots = s.size();
  b.atoms = atoms.size();
  for (const auto& a : atoms) b.branching = std::max(b.branching, a.existentials().size());
  return b;
}

namespace {

std::size_t sat_add(std::size_t a, std::size_t b) {
  return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max() : a + b;
}

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) return 0;
  return a > std::numeric_limits<std::size_t>::max() / b ? std::numeric_limits<std::size_t>::max() : a * b;
}

struct Shape {
  std::size_t atom;
  std::vector<std::shared_ptr<const Shape>> kids;
};
using ShapeList = std::vector<std::shared_ptr<const Shape>>;

// Lexicographically smallest k parts in [1, m] summing to n (parts[from..]).
bool fill_min(std::vector<std::size_t>& parts, std::size_t from, std::size_t n, std::size_t m) {
  const std::size_t k = parts.size() - from;
  if (n < k || n > k * m) return false;
  std::size_t extra = n - k;
  for (std::size_t i = parts.size(); i-- > from;) {
    const std::size_t add = std::min(extra, m - 1);
    parts[i] = 1 + add;
    extra -= add;
  }
  return true;
}

bool next_composition(std::vector<std::size_t>& parts, std::size_t m) {
  if (parts.size() < 2) return false;
  std::size_t prefix = 0;
  std::vector<std::size_t> pre(parts.size() + 1, 0);
  for (std::size_t i = 0; i < parts.size(); ++i) pre[i + 1] = pre[i] + parts[i];
  const std::size_t n = pre.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) {
    prefix = pre[i] + parts[i] + 1;
    if (parts[i] + 1 > m || prefix > n) continue;
    std::vector<std::size_t> trial = parts;
    trial[i] += 1;
    if (fill_min(trial, i + 1, n - prefix, m)) {
      parts = std::move(trial);
      return true;
    }
  }
  return false;
}

} // namespace

struct ForestEnumerator::Impl {
  std::vector<Var> roots;
  std::vector<Atom> atoms;
  std::vector<std::size_t> witnesses;
  ForestLimits limits;
  std::map<std::pair<std::vector<int>, std::size_t>, ShapeList> memo;  // (ancestor label counts, size)
  std::map<std::vector<int>, std::size_t> max_memo;
  std::size_t stored = 0;

  std::size_t n = 0;                   // current total size
  std::size_t max_tree = 0;            // largest root tree
  std::vector<std::size_t> parts;      // root tree sizes
  std::vector<const ShapeList*> lists;
  std::vector<std::size_t> idx;
  bool done = false;
  bool truncated = false;
  bool positioned = false;

  bool leaf(std::size_t a, const std::vector<int>& counts) const { return witnesses[a] == 0 || counts[a] >= 2; }

  std::size_t max_size(const std::vector<int>& counts) {
    if (auto it = max_memo.find(counts); it != max_memo.end()) return it->second;
    std::size_t best = 1;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      if (leaf(a, counts)) continue;
      std::vector<int> c = counts;
      ++c[a];
      best = std::max(best, 1 + witnesses[a] * max_size(c));
    }
    max_memo[counts] = best;
    return best;
  }

  // Trees of exactly `size` nodes at a position whose ancestors carry `counts`.
  const ShapeList& trees(const std::vector<int>& counts, std::size_t size) {
    auto key = std::make_pair(counts, size);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    ShapeList out;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      if (leaf(a, counts)) {
        if (size == 1) out.push_back(std::make_shared<const Shape>(Shape{a, {}}));
        continue;
      }
      const std::size_t e = witnesses[a];
      if (size < 1 + e) continue;
      std::vector<int> c = counts;
      ++c[a];
      const std::size_t m = max_size(c);
      std::vector<std::size_t> sub(e, 1);
      if (!fill_min(sub, 0, size - 1, m)) continue;
      do {
        std::vector<const ShapeList*> ls;
        bool empty = false;
        for (std::size_t k = 0; k < e && !empty; ++k) {
          ls.push_back(&trees(c, sub[k]));
          empty = ls.back()->empty();
        }
        if (empty) continue;
        std::vector<std::size_t> j(e, 0);
        for (;;) {
          Shape sh{a, {}};
          for (std::size_t k = 0; k < e; ++k) sh.kids.push_back((*ls[k])[j[k]]);
          out.push_back(std::make_shared<const Shape>(std::move(sh)));
          if (++stored > limits.max_trees) throw ForestLimitError("skolem tree enumeration exceeded max_trees", stored);
          std::size_t k = e;
          while (k-- > 0) {
            if (++j[k] < ls[k]->size()) break;
            j[k] = 0;
          }
          if (k == static_cast<std::size_t>(-1)) break;
        }
      } while (next_composition(sub, m));
    }
    return memo.emplace(std::move(key), std::move(out)).first->second;
  }

  // Positions on the first composition of the current size with non-empty tree lists.
  bool load_composition() {
    for (;;) {
      lists.clear();
      bool empty = false;
      for (std::size_t k = 0; k < parts.size() && !empty; ++k) {
        lists.push_back(&trees(std::vector<int>(atoms.size(), 0), parts[k]));
        empty = lists.back()->empty();
      }
      if (!empty) {
        idx.assign(parts.size(), 0);
        return true;
      }
      if (!next_composition(parts, max_tree)) return false;
    }
  }

  // Moves to the first composition of the next feasible size.
  bool next_size() {
    for (;;) {
      ++n;
      if (n > roots.size() * max_tree) return false;
      if (n > limits.max_forest_nodes) {
        truncated = true;
        return false;
      }
      parts.assign(roots.size(), 1);
      if (!fill_min(parts, 0, n, max_tree)) continue;
      if (load_composition()) return true;
    }
  }

  bool start() {
    if (atoms.empty()) return roots.empty();
    if (roots.empty()) return true;
    max_tree = max_size(std::vector<int>(atoms.size(), 0));
    n = roots.size() - 1;
    return next_size();
  }

  bool advance() {
    if (roots.empty()) return false;
    std::size_t k = idx.size();
    while (k-- > 0) {
      if (++idx[k] < lists[k]->size()) return true;
      idx[k] = 0;
    }
    if (next_composition(parts, max_tree) && load_composition()) return true;
    return next_size();
  }

  void place(const Shape& sh, const Var& name, SkolemForest& out, FreshVars& fresh) const {
    out.label.emplace(name, atoms[sh.atom]);
    for (const auto& k : sh.kids) {
      Var c = fresh.next();
      out.parent[c] = name;
      out.children[name].push_back(c);
      place(*k, c, out, fresh);
    }
  }
};

ForestEnumerator::ForestEnumerator(const FormulaSet& gamma, const VarSet& s, ForestLimits limits) : impl_(std::make_unique<Impl>()) {
  const NestedForall nf = require_nested(gamma);
  impl_->roots.assign(s.begin(), s.end());
  impl_->limits = limits;
  impl_->atoms = enumerate_atoms(nf.body, nf.x);
  for (const auto& a : impl_->atoms) impl_->witnesses.push_back(a.existentials().size());
}

ForestEnumerator::~ForestEnumerator() = default;
ForestEnumerator::ForestEnumerator(ForestEnumerator&&) noexcept = default;
ForestEnumerator& ForestEnumerator::operator=(ForestEnumerator&&) noexcept = default;

bool ForestEnumerator::truncated() const { return impl_->truncated; }
const std::vector<Atom>& ForestEnumerator::atoms() const { return impl_->atoms; }

std::size_t ForestEnumerator::total() const {
  const Impl& im = *impl_;
  std::map<std::vector<int>, std::size_t> memo;
  std::function<std::size_t(const std::vector<int>&)> slot = [&](const std::vector<int>& counts) -> std::size_t {
    if (auto it = memo.find(counts); it != memo.end()) return it->second;
    std::size_t sum = 0;
    for (std::size_t a = 0; a < im.atoms.size(); ++a) {
      std::size_t t = 1;
      if (!im.leaf(a, counts)) {
        std::vector<int> c = counts;
        ++c[a];
        const std::size_t per = slot(c);
        for (std::size_t i = 0; i < im.witnesses[a]; ++i) t = sat_mul(t, per);
      }
      sum = sat_add(sum, t);
    }
    memo[counts] = sum;
    return sum;
  };
  if (im.atoms.empty()) return im.roots.empty() ? 1 : 0;
  const std::size_t per = slot(std::vector<int>(im.atoms.size(), 0));
  std::size_t t = 1;
  for (std::size_t i = 0; i < im.roots.size(); ++i) t = sat_mul(t, per);
  return t;
}

std::optional<SkolemForest> ForestEnumerator::next(FreshVars& fresh) {
  Impl& im = *impl_;
  if (!im.positioned) {
    im.positioned = true;
    im.done = !im.start();
  }
  if (im.done) return std::nullopt;
  SkolemForest f;
  f.roots = im.roots;
  for (const auto& r : im.roots) fresh.reserve(r);
  for (std::size_t k = 0; k < im.roots.size(); ++k) im.place(*(*im.lists[k])[im.idx[k]], im.roots[k], f, fresh);
  im.done = !im.advance();
  return f;
}

std::vector<SkolemForest> enumerate_forests(const FormulaSet& gamma, const VarSet& s, FreshVars& fresh, ForestLimits limits) {
  ForestEnumerator en(gamma, s, limits);
  fresh.reserve(all_vars(gamma));
  fresh.reserve(s);
  std::vector<SkolemForest> out;
  while (auto f = en.next(fresh)) {
    if (out.size() >= limits.max_forests) throw ForestLimitError("skolem forest enumeration exceeded max_forests", out.size());
    out.push_back(std::move(*f));
  }
  if (en.truncated()) throw ForestLimitError("skolem forest enumeration exceeded max_forest_nodes", out.size());
  return out;
}

SkolemForest extend_forest(const SkolemForest& f, const Var& z, FreshVars& fresh, std::map<Var, Var>* copy_of) {
  if (!f.contains(z)) throw ForestError("extend_forest: " + z + " is not a forest node");
  if (!f.is_leaf(z)) throw ForestError("extend_forest: " + z + " is not a leaf");
  const Atom& a = f.label.at(z);
  if (a.existentials().empty()) throw ForestError("extend_forest: leaf " + z + " needs no witness");
  const auto p = f.path(z);
  std::optional<Var> z1;
  std::size_t same = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (f.label.at(p[i]) == a) {
      if (!z1) z1 = p[i];
      ++same;
    }
  }
  if (same < 2) throw ForestError("extend_forest: fewer than two ancestors of " + z + " share its label");

  for (const auto& v : f.nodes()) fresh.reserve(v);
  SkolemForest g = f;
  std::function<void(const Var&, const Var&)> graft = [&](const Var& orig, const Var& target) {
    for (const auto& c : f.kids(orig)) {
      Var n = fresh.next();
      if (copy_of) (*copy_of)[n] = c;
      g.parent[n] = target;
      g.children[target].push_back(n);
      g.label.emplace(n, f.label.at(c));
      const Atom& la = g.label.at(n);
      if (la.existentials().empty()) continue;
      auto pn = g.path(n);
      if (count_label(g, pn, pn.size() - 1, la) >= 2) continue;
      graft(c, n);
    }
  };
  graft(*z1, z);
  return g;
}

std::string dump_forest(const SkolemForest& f) {
  std::ostringstream os;
  std::function<void(const Var&, std::size_t)> rec = [&](const Var& v, std::size_t d) {
    os << std::string(2 * d, ' ') << v << " : " << to_string(f.label.at(v).members) << "\n";
    for (const auto& c : f.kids(v)) rec(c, d + 1);
  };
  for (const auto& r : f.roots) rec(r, 0);
  return os.str();
}

} // namespace foml
