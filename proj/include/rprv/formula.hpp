#pragma once

#include "rprv/predicate.hpp"

#include <memory>
#include <string>
#include <vector>

namespace rprv {

// Closed integer interval [lower, upper], 0 <= lower <= upper.
struct Interval {
  int lower = 0;
  int upper = 0;

  bool operator==(const Interval&) const = default;
};

enum class Operator {
  truth,
  falsity,
  predicate,
  negation,
  conjunction,
  disjunction,
  until,
  release,  // only produced by to_positive_normal_form
  eventually,
  always,
};

// Immutable bounded STL formula. Copies share structure.
class Formula {
 public:
  static Formula truth();
  static Formula falsity();
  static Formula atom(Predicate predicate);
  static Formula negation(Formula operand);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula until(Formula lhs, Interval interval, Formula rhs);
  static Formula release(Formula lhs, Interval interval, Formula rhs);
  static Formula eventually(Interval interval, Formula operand);
  static Formula always(Interval interval, Formula operand);

  Operator op() const noexcept;
  const Predicate& predicate() const;
  Interval interval() const;
  // Single child of negation / eventually / always.
  const Formula& operand() const;
  const Formula& lhs() const;
  const Formula& rhs() const;

  bool is_binary() const noexcept;
  bool is_temporal() const noexcept;

  bool operator==(const Formula& other) const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_{std::move(node)} {}
  std::shared_ptr<const Node> node_;
};

// Minimal horizon L such that states tau0..tau0+L decide satisfaction.
int formula_length(const Formula& phi);

// Negations pushed into predicates (h -> -h), Until under negation turned into Release.
Formula to_positive_normal_form(const Formula& phi);
bool is_positive_normal_form(const Formula& phi);

// Distinct predicates of the formula, by name, in first-occurrence order.
std::vector<Predicate> collect_predicates(const Formula& phi);

// Largest state component index referenced plus one.
std::size_t required_dimension(const Formula& phi);

// Text in the formula grammar; parse_formula(to_string(phi)) is equivalent to phi.
std::string to_string(const Formula& phi);

}  // namespace rprv
