// foml :: text syntax
//
//   iff    := imp ( "<->" imp )*
//   imp    := or ( "->" imp )?
//   or     := and ( "|" and )*
//   and    := unary ( "&" unary )*
//   unary  := "~" unary | "[]" unary | "<>" unary
//           | "forall" var ["."] iff | "exists" var ["."] iff | primary
//   primary:= "(" iff ")" | Pred [ "(" var ("," var)* ")" ]
//
// Predicates start with an uppercase letter, variables with a lowercase one.
// A quantifier body extends as far right as possible. `#` starts a line comment.
// Unicode aliases: ∀ ∃ □ ◇ ¬ ∧ ∨ → ↔.

#ifndef FOML_PARSER_HPP_
#define FOML_PARSER_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "formula.hpp"

namespace foml {

struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, SourceSpan span) : std::runtime_error(msg), span_(span) {}
  SourceSpan span() const noexcept { return span_; }

private:
  SourceSpan span_;
};

// Throws ParseError (syntax, lexical or arity errors).
Formula parse_formula(std::string_view text);

// Inverse of parse_formula up to structural equality.
std::string print_formula(const Formula& f);

// Reads a UTF-8 formula file; ParseError spans refer to the file contents.
Formula read_formula_file(const std::string& path);

} // namespace foml

#endif // FOML_PARSER_HPP_
