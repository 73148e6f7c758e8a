#pragma once

#include "rprv/formula.hpp"

#include <cstddef>
#include <string_view>

namespace rprv {

// Grammar (whitespace insensitive, precedence low to high: |, &, U, unary):
//
//   formula   := disj
//   disj      := conj ('|' conj)*
//   conj      := until ('&' until)*
//   until     := unary ('U' interval until)?
//   unary     := '!' unary | 'F' interval unary | 'G' interval unary | primary
//   primary   := 'TRUE' | 'FALSE' | '(' atom ')' | '(' formula ')'
//   atom      := linear ('>=' | '<=') number
//              | 'norm2(' var (',' var)* ';' number (',' number)* ')' ('>=' | '<=') number
//   linear    := ['+'|'-'] term (('+'|'-') term)*
//   term      := number ['*'] var | var | number
//   interval  := '[' int ',' int ']'
//
// Implication is not part of the grammar; write a => b as (!a | b).
//
// Throws ParseError on malformed text, unbounded intervals, or variables x_i with i >= dimension.
Formula parse_formula(std::string_view text, std::size_t dimension);

}  // namespace rprv
