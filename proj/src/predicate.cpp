#include "rprv/predicate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace rprv {

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

namespace {

void check_norm_arguments(const std::vector<std::size_t>& selector,
                          const std::vector<double>& center, double threshold) {
  if (selector.empty()) throw std::invalid_argument("norm predicate needs at least one component");
  if (selector.size() != center.size())
    throw std::invalid_argument("norm predicate selector and center differ in length");
  std::vector<std::size_t> sorted = selector;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("norm predicate selects a component twice");
  if (!(threshold >= 0.0) || !std::isfinite(threshold))
    throw std::invalid_argument("norm predicate threshold must be finite and nonnegative");
  for (double c : center)
    if (!std::isfinite(c)) throw std::invalid_argument("norm predicate center must be finite");
}

std::string affine_text(const std::vector<double>& a, double b) {
  std::string expr;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    const double mag = std::abs(a[i]);
    if (expr.empty()) {
      if (a[i] < 0) expr += "-";
    } else {
      expr += a[i] < 0 ? " - " : " + ";
    }
    if (mag != 1.0) expr += format_number(mag) + "*";
    expr += "x" + std::to_string(i);
  }
  return "(" + expr + " >= " + format_number(-b) + ")";
}

std::string norm_text(const std::vector<std::size_t>& selector, const std::vector<double>& center,
                      double threshold, bool inside) {
  std::string text = "(norm2(";
  for (std::size_t i = 0; i < selector.size(); ++i) {
    if (i) text += ",";
    text += "x" + std::to_string(selector[i]);
  }
  text += " ; ";
  for (std::size_t i = 0; i < center.size(); ++i) {
    if (i) text += ",";
    text += format_number(center[i]);
  }
  text += inside ? ") <= " : ") >= ";
  return text + format_number(threshold) + ")";
}

}  // namespace

Predicate Predicate::affine(std::vector<double> coefficients, double offset) {
  if (coefficients.empty()) throw std::invalid_argument("affine predicate needs coefficients");
  if (std::all_of(coefficients.begin(), coefficients.end(), [](double v) { return v == 0.0; }))
    throw std::invalid_argument("affine predicate does not depend on the state");
  for (double v : coefficients)
    if (!std::isfinite(v)) throw std::invalid_argument("affine coefficients must be finite");
  if (!std::isfinite(offset)) throw std::invalid_argument("affine offset must be finite");
  Predicate p;
  p.kind_ = PredicateKind::affine;
  p.coefficients_ = std::move(coefficients);
  p.offset_ = offset;
  p.finalize();
  return p;
}

Predicate Predicate::norm_inside(std::vector<std::size_t> selector, std::vector<double> center,
                                 double threshold) {
  check_norm_arguments(selector, center, threshold);
  Predicate p;
  p.kind_ = PredicateKind::norm_inside;
  p.selector_ = std::move(selector);
  p.center_ = std::move(center);
  p.threshold_ = threshold;
  p.finalize();
  return p;
}

Predicate Predicate::norm_outside(std::vector<std::size_t> selector, std::vector<double> center,
                                  double threshold) {
  Predicate p = norm_inside(std::move(selector), std::move(center), threshold);
  p.kind_ = PredicateKind::norm_outside;
  p.finalize();
  return p;
}

void Predicate::finalize() {
  switch (kind_) {
    case PredicateKind::affine: name_ = affine_text(coefficients_, offset_); break;
    case PredicateKind::norm_inside: name_ = norm_text(selector_, center_, threshold_, true); break;
    case PredicateKind::norm_outside:
      name_ = norm_text(selector_, center_, threshold_, false);
      break;
  }
}

double Predicate::distance_to_center(std::span<const double> x) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < selector_.size(); ++i) {
    const double d = x[selector_[i]] - center_[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double Predicate::evaluate(std::span<const double> x) const {
  if (x.size() < required_dimension())
    throw std::invalid_argument("state dimension too small for predicate " + name_);
  switch (kind_) {
    case PredicateKind::affine: {
      double h = offset_;
      for (std::size_t i = 0; i < coefficients_.size(); ++i) h += coefficients_[i] * x[i];
      return h;
    }
    case PredicateKind::norm_inside: return threshold_ - distance_to_center(x);
    case PredicateKind::norm_outside: return distance_to_center(x) - threshold_;
  }
  return 0.0;
}

Predicate Predicate::negated() const {
  Predicate p = *this;
  switch (kind_) {
    case PredicateKind::affine:
      for (double& a : p.coefficients_) a = -a;
      p.offset_ = -offset_;
      break;
    case PredicateKind::norm_inside: p.kind_ = PredicateKind::norm_outside; break;
    case PredicateKind::norm_outside: p.kind_ = PredicateKind::norm_inside; break;
  }
  p.finalize();
  return p;
}

std::size_t Predicate::required_dimension() const noexcept {
  if (kind_ == PredicateKind::affine) return coefficients_.size();
  return *std::max_element(selector_.begin(), selector_.end()) + 1;
}

}  // namespace rprv
