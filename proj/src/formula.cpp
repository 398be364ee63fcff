#include "foml/formula.hpp"

#include <functional>

namespace foml {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) noexcept {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

} // namespace

Formula Formula::make(Op op, std::string symbol, std::vector<Var> args, const Formula* a, const Formula* b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->symbol = std::move(symbol);
  n->args = std::move(args);
  std::size_t h = std::hash<int>{}(static_cast<int>(op));
  h = mix(h, std::hash<std::string>{}(n->symbol));
  for (const auto& v : n->args) h = mix(h, std::hash<std::string>{}(v));
  if (a) {
    n->a = a->node_;
    h = mix(h, a->hash());
    n->size += a->size();
  }
  if (b) {
    n->b = b->node_;
    h = mix(h, b->hash());
    n->size += b->size();
  }
  n->hash = h;
  return Formula(std::move(n));
}

Formula Formula::pred(std::string name, std::vector<Var> args) {
  return make(Op::Pred, std::move(name), std::move(args), nullptr, nullptr);
}
Formula Formula::negation(Formula f) { return make(Op::Not, {}, {}, &f, nullptr); }
Formula Formula::conj(Formula a, Formula b) { return make(Op::And, {}, {}, &a, &b); }
Formula Formula::disj(Formula a, Formula b) { return make(Op::Or, {}, {}, &a, &b); }
Formula Formula::implies(Formula a, Formula b) { return make(Op::Implies, {}, {}, &a, &b); }
Formula Formula::iff(Formula a, Formula b) { return make(Op::Iff, {}, {}, &a, &b); }
Formula Formula::exists(Var v, Formula body) { return make(Op::Exists, std::move(v), {}, &body, nullptr); }
Formula Formula::forall(Var v, Formula body) { return make(Op::Forall, std::move(v), {}, &body, nullptr); }
Formula Formula::box(Formula body) { return make(Op::Box, {}, {}, &body, nullptr); }
Formula Formula::diamond(Formula body) { return make(Op::Diamond, {}, {}, &body, nullptr); }

Formula Formula::literal(bool positive, std::string name, std::vector<Var> args) {
  Formula p = pred(std::move(name), std::move(args));
  return positive ? p : negation(p);
}

bool Formula::is_literal() const noexcept {
  return op() == Op::Pred || (op() == Op::Not && node_->a->op == Op::Pred);
}

bool Formula::is_binary() const noexcept {
  switch (op()) {
    case Op::And: case Op::Or: case Op::Implies: case Op::Iff: return true;
    default: return false;
  }
}

std::strong_ordering Formula::compare(const Node* a, const Node* b) noexcept {
  if (a == b) return std::strong_ordering::equal;
  if (auto c = a->op <=> b->op; c != 0) return c;
  if (auto c = a->symbol <=> b->symbol; c != 0) return c;
  if (auto c = a->args <=> b->args; c != 0) return c;
  if (a->a || b->a) {
    if (!a->a) return std::strong_ordering::less;
    if (!b->a) return std::strong_ordering::greater;
    if (auto c = compare(a->a.get(), b->a.get()); c != 0) return c;
  }
  if (a->b || b->b) {
    if (!a->b) return std::strong_ordering::less;
    if (!b->b) return std::strong_ordering::greater;
    if (auto c = compare(a->b.get(), b->b.get()); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

bool operator==(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.size() != b.size()) return false;
  return Formula::compare(a.node_.get(), b.node_.get()) == 0;
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) noexcept {
  return Formula::compare(a.node_.get(), b.node_.get());
}

} // namespace foml
