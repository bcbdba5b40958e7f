// Copyright 2026 The entop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "entop/opspec.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "entop/errors.hpp"

namespace entop {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  BranchSuperposition spec() {
    skip_ws();
    const std::size_t start = pos_;
    if (std::isalpha(static_cast<unsigned char>(peek()))) {
      const std::string word = identifier();
      skip_ws();
      if (at_end()) {
        if (auto alias = lookup_alias(word)) return *alias;
        throw ParseError(start, "unknown operator alias '" + word + "'");
      }
      pos_ = start;
    }
    std::vector<BranchTerm> terms;
    Complex sign = 1.0;
    if (accept('+')) {
    } else if (accept('-')) {
      sign = -1.0;
    }
    terms.push_back(term(sign));
    while (true) {
      skip_ws();
      if (at_end()) break;
      if (accept('+')) {
        sign = 1.0;
      } else if (accept('-')) {
        sign = -1.0;
      } else {
        fail("expected '+', '-' or end of input");
      }
      terms.push_back(term(sign));
    }
    return build_superposition(std::move(terms));
  }

  Complex standalone_expression() {
    const Complex v = expression();
    skip_ws();
    if (!at_end()) fail("unexpected trailing input");
    return v;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(pos_, message);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (!at_end() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  static std::optional<BranchSuperposition> lookup_alias(const std::string& word) {
    if (word == "SWAP") return swap_operator();
    if (word == "CNOT") return controlled_unitary(local::X());
    if (word == "FILTER") return entanglement_filter();
    if (word == "GHZ") return ghz_operator();
    if (word == "W") return w_operator();
    if (word == "TOFFOLI") return ccu(local::X());
    return std::nullopt;
  }

  // term := [ product '*' ] '[' factor { ',' factor } ']'
  BranchTerm term(Complex sign) {
    skip_ws();
    Complex coefficient = 1.0;
    if (peek() != '[') {
      coefficient = product(/*stop_before_bracket=*/true);
      expect('*');
    }
    expect('[');
    std::vector<LocalOperator> factors;
    factors.push_back(factor());
    while (accept(',')) factors.push_back(factor());
    expect(']');
    return BranchTerm{sign * coefficient, std::move(factors)};
  }

  LocalOperator factor() {
    skip_ws();
    const std::size_t start = pos_;
    const std::string name = identifier();
    if (name == "I") return local::I();
    if (name == "X") return local::X();
    if (name == "Y") return local::Y();
    if (name == "Z") return local::Z();
    if (name == "P0") return local::P0();
    if (name == "P1") return local::P1();
    if (name == "H" || name == "Q") {
      expect('(');
      const double theta = real_expression();
      expect(')');
      return name == "H" ? local::half_wave_plate(theta)
                         : local::quarter_wave_plate(theta);
    }
    if (name == "U") {
      expect('[');
      ComplexMatrix m(2, 2);
      m(0, 0) = expression();
      expect(',');
      m(0, 1) = expression();
      expect(';');
      m(1, 0) = expression();
      expect(',');
      m(1, 1) = expression();
      expect(']');
      return local::custom(std::move(m), std::string(text_.substr(start, pos_ - start)));
    }
    pos_ = start;
    fail(name.empty() ? "expected a factor token" : "unknown factor '" + name + "'");
  }

  double real_expression() {
    const std::size_t start = pos_;
    const Complex v = expression();
    if (std::abs(v.imag()) > 1e-12) {
      throw ParseError(start, "waveplate angle must be real");
    }
    return v.real();
  }

  // expression := product { ('+'|'-') product }
  Complex expression() {
    Complex v = product(false);
    while (true) {
      if (accept('+')) {
        v += product(false);
      } else if (accept('-')) {
        v -= product(false);
      } else {
        return v;
      }
    }
  }

  // product := unary { ('*'|'/') unary }
  Complex product(bool stop_before_bracket) {
    Complex v = unary();
    while (true) {
      skip_ws();
      if (peek() == '*') {
        if (stop_before_bracket && next_non_ws_after(pos_ + 1) == '[') return v;
        ++pos_;
        v *= unary();
      } else if (peek() == '/') {
        ++pos_;
        const std::size_t at = pos_;
        const Complex d = unary();
        if (d == Complex{0.0, 0.0}) throw ParseError(at, "division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  char next_non_ws_after(std::size_t p) const {
    while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
    return p < text_.size() ? text_[p] : '\0';
  }

  Complex unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    Complex base = primary();
    if (accept('^')) return std::pow(base, unary());
    return base;
  }

  Complex primary() {
    skip_ws();
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (accept('(')) {
      const Complex v = expression();
      expect(')');
      return v;
    }
    const std::size_t start = pos_;
    const std::string name = identifier();
    if (name == "i") return Complex{0.0, 1.0};
    if (name == "pi") return std::numbers::pi;
    if (name == "exp" || name == "sqrt" || name == "cos" || name == "sin") {
      expect('(');
      const Complex arg = expression();
      expect(')');
      if (name == "exp") return std::exp(arg);
      if (name == "sqrt") return std::sqrt(arg);
      if (name == "cos") return std::cos(arg);
      return std::sin(arg);
    }
    pos_ = start;
    fail(name.empty() ? "expected a number, 'i', 'pi', a function or '('"
                      : "unknown identifier '" + name + "'");
  }

  Complex number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (peek() == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) {
      pos_ = start;
      fail("malformed number");
    }
    if (peek() == 'e' || peek() == 'E') {
      const std::size_t mark = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (digits() == 0) pos_ = mark;  // not an exponent; leave 'e' unread
    }
    const std::string literal(text_.substr(start, pos_ - start));
    const double v = std::strtod(literal.c_str(), nullptr);
    if (!std::isfinite(v)) throw ParseError(start, "number out of range");
    return v;
  }
};

}  // namespace

BranchSuperposition parse_operator_spec(std::string_view text) {
  Parser parser(text);
  return parser.spec();
}

Complex parse_complex_expression(std::string_view text) {
  Parser parser(text);
  return parser.standalone_expression();
}

}  // namespace entop
