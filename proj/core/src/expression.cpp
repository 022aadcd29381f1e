#include "fpl/expression.hpp"

#include "fpl/error.hpp"
#include "fpl/text.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

namespace fpl {

namespace {

using Fn = std::function<double(double, double)>;

class Parser
{
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Fn parse_all(bool& constant)
  {
    auto f = expr();
    skip();
    if (pos_ != text_.size())
      fail("unexpected character");
    constant = !uses_vars_;
    return f;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const
  {
    throw InputError("expression '" + std::string(text_) + "': " + msg + " at position " + std::to_string(pos_));
  }

  void skip()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c)
  {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Fn expr()
  {
    Fn lhs = term();
    while (true) {
      if (accept('+')) {
        auto rhs = term();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) + rhs(x, y); };
      } else if (accept('-')) {
        auto rhs = term();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) - rhs(x, y); };
      } else {
        return lhs;
      }
    }
  }

  Fn term()
  {
    Fn lhs = unary();
    while (true) {
      if (accept('*')) {
        auto rhs = unary();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) * rhs(x, y); };
      } else if (accept('/')) {
        auto rhs = unary();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) / rhs(x, y); };
      } else {
        return lhs;
      }
    }
  }

  Fn unary()
  {
    if (accept('-')) {
      auto inner = unary();
      return [inner](double x, double y) { return -inner(x, y); };
    }
    if (accept('+'))
      return unary();
    return power();
  }

  // Right-associative: a^b^c = a^(b^c).
  Fn power()
  {
    Fn base = primary();
    if (accept('^')) {
      auto exponent = unary();
      return [base, exponent](double x, double y) { return std::pow(base(x, y), exponent(x, y)); };
    }
    return base;
  }

  Fn primary()
  {
    skip();
    if (pos_ >= text_.size())
      fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = expr();
      if (!accept(')'))
        fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return number();
    if (std::isalpha(static_cast<unsigned char>(c)))
      return identifier();
    fail("unexpected character");
  }

  Fn number()
  {
    const auto start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      auto look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-'))
        ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      }
    }
    double v = 0.0;
    try {
      v = parse_double(text_.substr(start, pos_ - start), "number");
    } catch (const InputError&) {
      fail("malformed number");
    }
    return [v](double, double) { return v; };
  }

  Fn identifier()
  {
    const auto start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));

    if (name == "x") {
      uses_vars_ = true;
      return [](double x, double) { return x; };
    }
    if (name == "y") {
      uses_vars_ = true;
      return [](double, double y) { return y; };
    }
    if (name == "r") {
      uses_vars_ = true;
      return [](double x, double y) { return std::hypot(x, y); };
    }
    if (name == "pi")
      return [](double, double) { return std::numbers::pi; };
    if (name == "e")
      return [](double, double) { return std::numbers::e; };

    if (!accept('('))
      fail("unknown identifier '" + name + "'");
    std::vector<Fn> args{expr()};
    while (accept(','))
      args.push_back(expr());
    if (!accept(')'))
      fail("expected ')'");

    auto unary_fn = [&](double (*op)(double)) -> Fn {
      if (args.size() != 1)
        fail(name + " takes one argument");
      auto a = args[0];
      return [a, op](double x, double y) { return op(a(x, y)); };
    };
    auto binary_fn = [&](double (*op)(double, double)) -> Fn {
      if (args.size() != 2)
        fail(name + " takes two arguments");
      auto a = args[0];
      auto b = args[1];
      return [a, b, op](double x, double y) { return op(a(x, y), b(x, y)); };
    };

    if (name == "sin")
      return unary_fn([](double v) { return std::sin(v); });
    if (name == "cos")
      return unary_fn([](double v) { return std::cos(v); });
    if (name == "tan")
      return unary_fn([](double v) { return std::tan(v); });
    if (name == "exp")
      return unary_fn([](double v) { return std::exp(v); });
    if (name == "log")
      return unary_fn([](double v) { return std::log(v); });
    if (name == "sqrt")
      return unary_fn([](double v) { return std::sqrt(v); });
    if (name == "abs")
      return unary_fn([](double v) { return std::abs(v); });
    if (name == "min")
      return binary_fn([](double a, double b) { return std::min(a, b); });
    if (name == "max")
      return binary_fn([](double a, double b) { return std::max(a, b); });
    if (name == "pow")
      return binary_fn([](double a, double b) { return std::pow(a, b); });
    fail("unknown function '" + name + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  bool uses_vars_ = false;
};

} // namespace

Expression::Expression() : Expression(0.0) {}

Expression::Expression(double constant)
  : eval_([constant](double, double) { return constant; }), source_(format_double(constant)), constant_(true)
{}

Expression Expression::parse(std::string_view text)
{
  Expression e;
  Parser parser(text);
  e.eval_ = parser.parse_all(e.constant_);
  e.source_ = std::string(trim(text));
  return e;
}

} // namespace fpl
