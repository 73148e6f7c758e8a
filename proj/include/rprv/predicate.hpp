#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rprv {

enum class PredicateKind { affine, norm_inside, norm_outside };

// Predicate function h: R^n -> R; the atom holds at x iff h(x) >= 0.
//
//   affine        h(x) = a^T x + b
//   norm_inside   h(x) = c - ||x_sel - p||_2
//   norm_outside  h(x) = ||x_sel - p||_2 - c
//
// The name is the canonical grammar text of the atom, so syntactically
// different spellings of the same function share one name.
class Predicate {
 public:
  static Predicate affine(std::vector<double> coefficients, double offset);
  static Predicate norm_inside(std::vector<std::size_t> selector, std::vector<double> center,
                               double threshold);
  static Predicate norm_outside(std::vector<std::size_t> selector, std::vector<double> center,
                                double threshold);

  double evaluate(std::span<const double> x) const;
  // Predicate for -h.
  Predicate negated() const;

  PredicateKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  double offset() const noexcept { return offset_; }
  const std::vector<std::size_t>& selector() const noexcept { return selector_; }
  const std::vector<double>& center() const noexcept { return center_; }
  double threshold() const noexcept { return threshold_; }

  // Smallest state dimension this predicate can be evaluated on.
  std::size_t required_dimension() const noexcept;
  // ||x_sel - p||_2 for the norm kinds.
  double distance_to_center(std::span<const double> x) const;

  bool operator==(const Predicate& other) const {
    return kind_ == other.kind_ && coefficients_ == other.coefficients_ &&
           offset_ == other.offset_ && selector_ == other.selector_ &&
           center_ == other.center_ && threshold_ == other.threshold_;
  }

 private:
  Predicate() = default;
  void finalize();

  PredicateKind kind_ = PredicateKind::affine;
  std::vector<double> coefficients_;
  double offset_ = 0.0;
  std::vector<std::size_t> selector_;
  std::vector<double> center_;
  double threshold_ = 0.0;
  std::string name_;
};

// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace rprv
