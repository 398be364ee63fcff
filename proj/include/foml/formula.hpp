// foml :: Formula
//
// Immutable, structurally shared AST for first-order modal logic over
// relational signatures (no equality, constants or function symbols).

#ifndef FOML_FORMULA_HPP_
#define FOML_FORMULA_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace foml {

using Var = std::string;
using VarSet = std::set<Var>;

enum class Op : std::uint8_t { Pred, Not, And, Or, Implies, Iff, Exists, Forall, Box, Diamond };

// Malformed formulas (arity clashes, non-NNF input to NNF-only operations, ...)
class FormulaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class Formula {
public:
  static Formula pred(std::string name, std::vector<Var> args);
  static Formula negation(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula exists(Var v, Formula body);
  static Formula forall(Var v, Formula body);
  static Formula box(Formula body);
  static Formula diamond(Formula body);

  // Literal P(args) or ~P(args).
  static Formula literal(bool positive, std::string name, std::vector<Var> args);

  Op op() const noexcept { return node_->op; }
  // Predicate name for Pred, bound variable for Exists/Forall, empty otherwise.
  const std::string& symbol() const noexcept { return node_->symbol; }
  const std::vector<Var>& args() const noexcept { return node_->args; }
  // Sole child of Not/Exists/Forall/Box/Diamond, left child of binary connectives.
  Formula body() const { return Formula(node_->a); }
  Formula lhs() const { return Formula(node_->a); }
  Formula rhs() const { return Formula(node_->b); }

  std::size_t hash() const noexcept { return node_->hash; }
  // Number of connectives, quantifiers and atoms.
  std::size_t size() const noexcept { return node_->size; }

  bool is_pred() const noexcept { return op() == Op::Pred; }
  bool is_literal() const noexcept;
  bool is_modal() const noexcept { return op() == Op::Box || op() == Op::Diamond; }
  bool is_module() const noexcept { return is_literal() || is_modal(); }
  bool is_quantifier() const noexcept { return op() == Op::Exists || op() == Op::Forall; }
  bool is_binary() const noexcept;

  friend bool operator==(const Formula& a, const Formula& b) noexcept;
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) noexcept;

  struct Hash {
    std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
  };

private:
  struct Node {
    Op op;
    std::string symbol;
    std::vector<Var> args;
    std::shared_ptr<const Node> a, b;
    std::size_t hash = 0;
    std::size_t size = 1;
  };

  explicit Formula(std::shared_ptr<const Node> n) noexcept : node_(std::move(n)) {}
  static Formula make(Op op, std::string symbol, std::vector<Var> args, const Formula* a, const Formula* b);
  static std::strong_ordering compare(const Node* a, const Node* b) noexcept;

  std::shared_ptr<const Node> node_;
};

using FormulaSet = std::set<Formula>;

// Text form in the surface syntax of the parser (defined in parser.cpp).
std::string to_string(const Formula& f);
std::ostream& operator<<(std::ostream& os, const Formula& f);
std::string to_string(const FormulaSet& fs);

} // namespace foml

#endif // FOML_FORMULA_HPP_
