#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

namespace fpl {

/**
 * A closed-form scalar function of (x, y), parsed from text.
 *
 * Grammar: numbers, the variables x, y, r (= |(x,y)|), the constants pi and e,
 * + - * / ^, parentheses and the functions sin cos tan exp log sqrt abs min max pow.
 */
class Expression
{
public:
  /// The constant function 0.
  Expression();
  explicit Expression(double constant);

  /// Throws InputError with the position of the first syntax error.
  static Expression parse(std::string_view text);

  double operator()(double x, double y) const { return eval_(x, y); }
  const std::string& source() const noexcept { return source_; }
  bool is_constant() const noexcept { return constant_; }

private:
  std::function<double(double, double)> eval_;
  std::string source_;
  bool constant_ = true;
};

} // namespace fpl
