#pragma once

#include "hyperlab/lcnum.hpp"
#include "hyperlab/rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hyperlab {

// Arithmetic expression over the field. Immutable; copies share structure.
class Expr {
public:
    enum class Op { constant, variable, add, sub, mul, div, neg, pow, exp, sin, cos };

    static Expr constant(const Rational& r);
    static Expr variable(std::string name);
    static Expr binary(Op op, Expr a, Expr b);
    static Expr neg(Expr a);
    static Expr power(Expr a, long n);
    static Expr call(Op fn, Expr a);

    Op op() const noexcept;
    const Rational& value() const;      // constant
    const std::string& name() const;    // variable
    long exponent() const;              // pow
    const Expr& arg(std::size_t i) const;
    std::size_t arity() const noexcept;

    std::set<std::string> free_vars() const;

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);

Expr parse_expr(std::string_view text);
std::string to_string(const Expr& e);

struct EvalOptions {
    long order = kDefaultTrunc;  // truncation exponent for division and negative powers
    int series_terms = 12;       // Maclaurin terms for exp/sin/cos
};

using Env = std::map<std::string, LCNum>;

LCNum eval_expr(const Expr& e, const Env& env, const EvalOptions& opt = {});

// Coefficients c[0..d] of a univariate polynomial, c[k] multiplies var^k.
using Poly = std::vector<Rational>;

// nullopt when e is not a polynomial in var (other free variables count as
// non-polynomial too).
std::optional<Poly> as_polynomial(const Expr& e, const std::string& var);
Poly poly_trim(Poly p);
Rational poly_eval(const Poly& p, const Rational& x);
Poly poly_derivative(const Poly& p);
Expr poly_to_expr(const Poly& p, const std::string& var);

}  // namespace hyperlab
