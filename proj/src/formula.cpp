#include "rprv/formula.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>

namespace rprv {

struct Formula::Node {
  Operator op;
  std::optional<Predicate> predicate;
  Interval interval;
  std::vector<Formula> children;
};

namespace {

void check_interval(Interval iv) {
  if (iv.lower < 0 || iv.upper < iv.lower)
    throw std::invalid_argument("interval must satisfy 0 <= lower <= upper");
}

}  // namespace

Formula Formula::truth() {
  return Formula(std::make_shared<const Node>(Node{Operator::truth, std::nullopt, {}, {}}));
}

Formula Formula::falsity() {
  return Formula(std::make_shared<const Node>(Node{Operator::falsity, std::nullopt, {}, {}}));
}

Formula Formula::atom(Predicate predicate) {
  return Formula(
      std::make_shared<const Node>(Node{Operator::predicate, std::move(predicate), {}, {}}));
}

Formula Formula::negation(Formula operand) {
  return Formula(std::make_shared<const Node>(
      Node{Operator::negation, std::nullopt, {}, {std::move(operand)}}));
}

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Operator::conjunction, std::nullopt, {}, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Operator::disjunction, std::nullopt, {}, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::until(Formula lhs, Interval interval, Formula rhs) {
  check_interval(interval);
  return Formula(std::make_shared<const Node>(
      Node{Operator::until, std::nullopt, interval, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::release(Formula lhs, Interval interval, Formula rhs) {
  check_interval(interval);
  return Formula(std::make_shared<const Node>(
      Node{Operator::release, std::nullopt, interval, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::eventually(Interval interval, Formula operand) {
  check_interval(interval);
  return Formula(std::make_shared<const Node>(
      Node{Operator::eventually, std::nullopt, interval, {std::move(operand)}}));
}

Formula Formula::always(Interval interval, Formula operand) {
  check_interval(interval);
  return Formula(std::make_shared<const Node>(
      Node{Operator::always, std::nullopt, interval, {std::move(operand)}}));
}

Operator Formula::op() const noexcept { return node_->op; }

const Predicate& Formula::predicate() const {
  if (!node_->predicate) throw std::logic_error("formula node is not a predicate");
  return *node_->predicate;
}

Interval Formula::interval() const {
  if (!is_temporal()) throw std::logic_error("formula node has no interval");
  return node_->interval;
}

const Formula& Formula::operand() const {
  if (node_->children.size() != 1) throw std::logic_error("formula node is not unary");
  return node_->children[0];
}

const Formula& Formula::lhs() const {
  if (node_->children.size() != 2) throw std::logic_error("formula node is not binary");
  return node_->children[0];
}

const Formula& Formula::rhs() const {
  if (node_->children.size() != 2) throw std::logic_error("formula node is not binary");
  return node_->children[1];
}

bool Formula::is_binary() const noexcept { return node_->children.size() == 2; }

bool Formula::is_temporal() const noexcept {
  switch (node_->op) {
    case Operator::until:
    case Operator::release:
    case Operator::eventually:
    case Operator::always: return true;
    default: return false;
  }
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.op != b.op || a.predicate != b.predicate) return false;
  if (is_temporal() && !(a.interval == b.interval)) return false;
  return a.children == b.children;
}

int formula_length(const Formula& phi) {
  switch (phi.op()) {
    case Operator::truth:
    case Operator::falsity:
    case Operator::predicate: return 0;
    case Operator::negation: return formula_length(phi.operand());
    case Operator::conjunction:
    case Operator::disjunction: return std::max(formula_length(phi.lhs()), formula_length(phi.rhs()));
    case Operator::until:
    case Operator::release:
      return phi.interval().upper + std::max(formula_length(phi.lhs()), formula_length(phi.rhs()));
    case Operator::eventually:
    case Operator::always: return phi.interval().upper + formula_length(phi.operand());
  }
  return 0;
}

namespace {

Formula push_negation(const Formula& phi, bool negate) {
  switch (phi.op()) {
    case Operator::truth: return negate ? Formula::falsity() : phi;
    case Operator::falsity: return negate ? Formula::truth() : phi;
    case Operator::predicate: return negate ? Formula::atom(phi.predicate().negated()) : phi;
    case Operator::negation: return push_negation(phi.operand(), !negate);
    case Operator::conjunction:
    case Operator::disjunction: {
      Formula l = push_negation(phi.lhs(), negate);
      Formula r = push_negation(phi.rhs(), negate);
      const bool conj = (phi.op() == Operator::conjunction) != negate;
      return conj ? Formula::conjunction(std::move(l), std::move(r))
                  : Formula::disjunction(std::move(l), std::move(r));
    }
    case Operator::until:
    case Operator::release: {
      Formula l = push_negation(phi.lhs(), negate);
      Formula r = push_negation(phi.rhs(), negate);
      const bool until = (phi.op() == Operator::until) != negate;
      return until ? Formula::until(std::move(l), phi.interval(), std::move(r))
                   : Formula::release(std::move(l), phi.interval(), std::move(r));
    }
    case Operator::eventually:
    case Operator::always: {
      Formula c = push_negation(phi.operand(), negate);
      const bool ev = (phi.op() == Operator::eventually) != negate;
      return ev ? Formula::eventually(phi.interval(), std::move(c))
                : Formula::always(phi.interval(), std::move(c));
    }
  }
  return phi;
}

void collect(const Formula& phi, std::vector<Predicate>& out, std::set<std::string>& seen) {
  if (phi.op() == Operator::predicate) {
    if (seen.insert(phi.predicate().name()).second) out.push_back(phi.predicate());
    return;
  }
  if (phi.op() == Operator::truth || phi.op() == Operator::falsity) return;
  if (phi.is_binary()) {
    collect(phi.lhs(), out, seen);
    collect(phi.rhs(), out, seen);
  } else {
    collect(phi.operand(), out, seen);
  }
}

std::string interval_text(Interval iv) {
  return "[" + std::to_string(iv.lower) + "," + std::to_string(iv.upper) + "]";
}

}  // namespace

Formula to_positive_normal_form(const Formula& phi) { return push_negation(phi, false); }

bool is_positive_normal_form(const Formula& phi) {
  switch (phi.op()) {
    case Operator::negation: return false;
    case Operator::truth:
    case Operator::falsity:
    case Operator::predicate: return true;
    default:
      if (phi.is_binary()) return is_positive_normal_form(phi.lhs()) && is_positive_normal_form(phi.rhs());
      return is_positive_normal_form(phi.operand());
  }
}

std::vector<Predicate> collect_predicates(const Formula& phi) {
  std::vector<Predicate> out;
  std::set<std::string> seen;
  collect(phi, out, seen);
  return out;
}

std::size_t required_dimension(const Formula& phi) {
  std::size_t n = 0;
  for (const auto& p : collect_predicates(phi)) n = std::max(n, p.required_dimension());
  return n;
}

std::string to_string(const Formula& phi) {
  switch (phi.op()) {
    case Operator::truth: return "TRUE";
    case Operator::falsity: return "FALSE";
    case Operator::predicate: return phi.predicate().name();
    case Operator::negation: return "!" + to_string(phi.operand());
    case Operator::conjunction: return "(" + to_string(phi.lhs()) + " & " + to_string(phi.rhs()) + ")";
    case Operator::disjunction: return "(" + to_string(phi.lhs()) + " | " + to_string(phi.rhs()) + ")";
    case Operator::until:
      return "(" + to_string(phi.lhs()) + " U" + interval_text(phi.interval()) + " " +
             to_string(phi.rhs()) + ")";
    case Operator::release:
      // Not expressible in the grammar; emitted through the Until duality.
      return "!(" + to_string(Formula::negation(phi.lhs())) + " U" + interval_text(phi.interval()) +
             " " + to_string(Formula::negation(phi.rhs())) + ")";
    case Operator::eventually: return "F" + interval_text(phi.interval()) + " " + to_string(phi.operand());
    case Operator::always: return "G" + interval_text(phi.interval()) + " " + to_string(phi.operand());
  }
  return {};
}

}  // namespace rprv
