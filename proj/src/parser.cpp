#include "rprv/parser.hpp"

#include "rprv/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>

namespace rprv {

namespace {

// Errors that must not trigger backtracking from an atom to a grouped formula.
class FatalParseError : public ParseError {
 public:
  using ParseError::ParseError;
};

class Parser {
 public:
  Parser(std::string_view text, std::size_t dimension) : text_{text}, dimension_{dimension} {}

  Formula parse() {
    Formula phi = disjunction();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return phi;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }
  [[noreturn]] void fail_fatal(const std::string& message) const {
    throw FatalParseError(message, pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool accept_keyword(std::string_view word) {
    skip_space();
    if (text_.substr(pos_, word.size()) != word) return false;
    const std::size_t end = pos_ + word.size();
    if (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
      return false;
    pos_ = end;
    return true;
  }

  // 'F' / 'G' / 'U' followed directly (modulo spaces) by '['.
  bool accept_temporal(char letter) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != letter) return false;
    std::size_t p = pos_ + 1;
    while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
    if (p >= text_.size() || text_[p] != '[') return false;
    pos_ = p;
    return true;
  }

  std::optional<double> number() {
    skip_space();
    std::size_t p = pos_;
    if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
    const std::size_t digits = p;
    while (p < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[p])) || text_[p] == '.' ||
                                text_[p] == 'e' || text_[p] == 'E' ||
                                ((text_[p] == '+' || text_[p] == '-') && p > digits &&
                                 (text_[p - 1] == 'e' || text_[p - 1] == 'E'))))
      ++p;
    if (p == digits) return std::nullopt;
    double value = 0.0;
    const char* first = text_.data() + pos_;
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, text_.data() + p, value);
    if (ec != std::errc{} || ptr != text_.data() + p) fail("malformed number");
    if (!std::isfinite(value)) fail("number out of range");
    pos_ = p;
    return value;
  }

  int integer() {
    skip_space();
    if (text_.substr(pos_, 3) == "inf" || text_.substr(pos_, 3) == "\xE2\x88\x9E")
      fail("unbounded interval; only bounded temporal operators are supported");
    std::size_t p = pos_;
    while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
    if (p == pos_) fail("expected a nonnegative integer");
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + p, value);
    if (ec != std::errc{}) fail("interval bound out of range");
    pos_ = p;
    return value;
  }

  Interval interval() {
    expect('[');
    Interval iv;
    iv.lower = integer();
    if (!accept(',')) {
      if (peek(']')) fail("unbounded interval; only bounded temporal operators are supported");
      fail("expected ','");
    }
    if (peek(']')) fail("unbounded interval; only bounded temporal operators are supported");
    iv.upper = integer();
    expect(']');
    if (iv.upper < iv.lower) fail("interval upper bound is below its lower bound");
    return iv;
  }

  std::optional<std::size_t> variable() {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != 'x') return std::nullopt;
    std::size_t p = pos_ + 1;
    const std::size_t start = p;
    while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
    if (p == start) return std::nullopt;
    std::size_t index = 0;
    std::from_chars(text_.data() + start, text_.data() + p, index);
    if (index >= dimension_)
      fail_fatal("variable x" + std::to_string(index) + " exceeds state dimension " + std::to_string(dimension_));
    pos_ = p;
    return index;
  }

  // Returns +1 for '>=' and -1 for '<='.
  int comparison() {
    skip_space();
    if (text_.substr(pos_, 2) == ">=") {
      pos_ += 2;
      return 1;
    }
    if (text_.substr(pos_, 2) == "<=") {
      pos_ += 2;
      return -1;
    }
    fail("expected '>=' or '<='");
  }

  Predicate norm_atom() {
    expect('(');
    std::vector<std::size_t> selector;
    do {
      auto v = variable();
      if (!v) fail("expected a state variable");
      selector.push_back(*v);
    } while (accept(','));
    expect(';');
    std::vector<double> center;
    do {
      auto c = number();
      if (!c) fail("expected a number");
      center.push_back(*c);
    } while (accept(','));
    if (center.size() != selector.size()) fail("norm2 center length differs from variable count");
    expect(')');
    const int cmp = comparison();
    auto k = number();
    if (!k) fail("expected a number");
    if (*k < 0) fail_fatal("norm2 threshold must be nonnegative");
    return cmp < 0 ? Predicate::norm_inside(std::move(selector), std::move(center), *k)
                   : Predicate::norm_outside(std::move(selector), std::move(center), *k);
  }

  Predicate linear_atom() {
    std::vector<double> a(dimension_, 0.0);
    double constant = 0.0;
    bool first = true;
    bool any_term = false;
    while (true) {
      double sign = 1.0;
      if (accept('+')) {
      } else if (accept('-')) {
        sign = -1.0;
      } else if (!first) {
        break;
      }
      first = false;
      skip_space();
      if (auto v = variable()) {
        a[*v] += sign;
      } else if (auto c = number()) {
        accept('*');
        if (auto w = variable()) {
          a[*w] += sign * *c;
        } else {
          constant += sign * *c;
        }
      } else {
        fail("expected a term");
      }
      any_term = true;
    }
    if (!any_term) fail("expected a linear expression");
    const int cmp = comparison();
    auto k = number();
    if (!k) fail("expected a number");
    const std::size_t at = pos_;
    for (double& c : a) c *= cmp;
    const double offset = cmp * (constant - *k);
    try {
      return Predicate::affine(std::move(a), offset);
    } catch (const std::invalid_argument& e) {
      throw FatalParseError(e.what(), at);
    }
  }

  // After '(' has been consumed.
  std::optional<Predicate> try_atom() {
    const std::size_t save = pos_;
    try {
      Predicate p = accept_keyword("norm2") ? norm_atom() : linear_atom();
      expect(')');
      return p;
    } catch (const FatalParseError&) {
      throw;
    } catch (const ParseError&) {
      pos_ = save;
      return std::nullopt;
    }
  }

  Formula primary() {
    if (accept_keyword("TRUE")) return Formula::truth();
    if (accept_keyword("FALSE")) return Formula::falsity();
    if (!accept('(')) fail("expected a formula");
    if (auto p = try_atom()) return Formula::atom(std::move(*p));
    Formula inner = disjunction();
    expect(')');
    return inner;
  }

  Formula unary() {
    if (accept('!')) return Formula::negation(unary());
    if (accept_temporal('F')) {
      Interval iv = interval();
      return Formula::eventually(iv, unary());
    }
    if (accept_temporal('G')) {
      Interval iv = interval();
      return Formula::always(iv, unary());
    }
    return primary();
  }

  Formula until() {
    Formula lhs = unary();
    if (accept_temporal('U')) {
      Interval iv = interval();
      return Formula::until(std::move(lhs), iv, until());
    }
    return lhs;
  }

  Formula conjunction() {
    Formula phi = until();
    while (accept('&')) phi = Formula::conjunction(std::move(phi), until());
    return phi;
  }

  Formula disjunction() {
    Formula phi = conjunction();
    while (accept('|')) phi = Formula::disjunction(std::move(phi), conjunction());
    return phi;
  }

  std::string_view text_;
  std::size_t dimension_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text, std::size_t dimension) {
  if (dimension == 0) throw InputError("formula dimension must be at least 1");
  return Parser(text, dimension).parse();
}

}  // namespace rprv
