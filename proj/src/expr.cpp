#include "hyperlab/expr.hpp"

#include "hyperlab/error.hpp"

#include <cctype>

namespace hyperlab {

struct Expr::Node {
    Op op;
    Rational value;
    std::string name;
    long exponent = 0;
    std::vector<Expr> args;
};

Expr Expr::constant(const Rational& r) {
    return Expr(std::make_shared<const Node>(Node{Op::constant, r, {}, 0, {}}));
}

Expr Expr::variable(std::string name) {
    return Expr(std::make_shared<const Node>(Node{Op::variable, 0, std::move(name), 0, {}}));
}

Expr Expr::binary(Op op, Expr a, Expr b) {
    return Expr(std::make_shared<const Node>(Node{op, 0, {}, 0, {std::move(a), std::move(b)}}));
}

Expr Expr::neg(Expr a) {
    return Expr(std::make_shared<const Node>(Node{Op::neg, 0, {}, 0, {std::move(a)}}));
}

Expr Expr::power(Expr a, long n) {
    return Expr(std::make_shared<const Node>(Node{Op::pow, 0, {}, n, {std::move(a)}}));
}

Expr Expr::call(Op fn, Expr a) {
    return Expr(std::make_shared<const Node>(Node{fn, 0, {}, 0, {std::move(a)}}));
}

Expr::Op Expr::op() const noexcept { return node_->op; }
const Rational& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
long Expr::exponent() const { return node_->exponent; }
const Expr& Expr::arg(std::size_t i) const { return node_->args.at(i); }
std::size_t Expr::arity() const noexcept { return node_->args.size(); }

std::set<std::string> Expr::free_vars() const {
    std::set<std::string> out;
    if (op() == Op::variable) out.insert(name());
    for (const auto& a : node_->args) {
        auto sub = a.free_vars();
        out.insert(sub.begin(), sub.end());
    }
    return out;
}

Expr operator+(Expr a, Expr b) { return Expr::binary(Expr::Op::add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(Expr::Op::sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(Expr::Op::mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(Expr::Op::div, std::move(a), std::move(b)); }

// ---- parsing ----

namespace {

struct ExprParser {
    std::string_view s;
    std::size_t i = 0;

    void ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool peek(char c) {
        ws();
        return i < s.size() && s[i] == c;
    }
    bool eat(char c) {
        if (!peek(c)) return false;
        ++i;
        return true;
    }
    void expect(char c) {
        if (!eat(c)) throw SyntaxError(std::string("expected '") + c + "'", i);
    }

    Expr expr() {
        Expr e = term();
        while (true) {
            if (eat('+'))
                e = e + term();
            else if (eat('-'))
                e = e - term();
            else
                return e;
        }
    }
    Expr term() {
        Expr e = unary();
        while (true) {
            if (eat('*'))
                e = e * unary();
            else if (eat('/'))
                e = e / unary();
            else
                return e;
        }
    }
    Expr unary() {
        if (eat('-')) return Expr::neg(unary());
        return power();
    }
    Expr power() {
        Expr base = primary();
        if (eat('^')) {
            bool neg = eat('-');
            ws();
            std::size_t b = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (b == i) throw SyntaxError("expected integer exponent", i);
            long n = std::stol(std::string(s.substr(b, i - b)));
            return Expr::power(base, neg ? -n : n);
        }
        return base;
    }
    Expr primary() {
        ws();
        if (i >= s.size()) throw SyntaxError("unexpected end of expression", i);
        char c = s[i];
        if (c == '(') {
            ++i;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t b = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            return Expr::constant(Rational(Integer(std::string(s.substr(b, i - b)))));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t b = i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            std::string id(s.substr(b, i - b));
            if (peek('(')) {
                Expr::Op fn;
                if (id == "exp")
                    fn = Expr::Op::exp;
                else if (id == "sin")
                    fn = Expr::Op::sin;
                else if (id == "cos")
                    fn = Expr::Op::cos;
                else
                    throw SyntaxError("unknown function '" + id + "'", b);
                expect('(');
                Expr a = expr();
                expect(')');
                return Expr::call(fn, a);
            }
            return Expr::variable(id);
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", i);
    }
};

int precedence(const Expr& e) {
    switch (e.op()) {
        case Expr::Op::add:
        case Expr::Op::sub: return 1;
        case Expr::Op::mul:
        case Expr::Op::div: return 2;
        case Expr::Op::neg: return 3;
        case Expr::Op::pow: return 4;
        case Expr::Op::constant: return is_integer(e.value()) && e.value() >= 0 ? 5 : 0;
        default: return 5;
    }
}

std::string print(const Expr& e);

std::string wrap(const Expr& e, int min_prec) {
    std::string s = print(e);
    return precedence(e) < min_prec ? "(" + s + ")" : s;
}

std::string print(const Expr& e) {
    using Op = Expr::Op;
    switch (e.op()) {
        case Op::constant: {
            const Rational& v = e.value();
            if (v < 0) return "-" + wrap(Expr::constant(-v), 4);
            return to_string(v);
        }
        case Op::variable: return e.name();
        case Op::add: return wrap(e.arg(0), 1) + " + " + wrap(e.arg(1), 2);
        case Op::sub: return wrap(e.arg(0), 1) + " - " + wrap(e.arg(1), 2);
        case Op::mul: return wrap(e.arg(0), 2) + "*" + wrap(e.arg(1), 3);
        case Op::div: return wrap(e.arg(0), 2) + "/" + wrap(e.arg(1), 3);
        case Op::neg: return "-" + wrap(e.arg(0), 3);
        case Op::pow: return wrap(e.arg(0), 5) + "^" + std::to_string(e.exponent());
        case Op::exp: return "exp(" + print(e.arg(0)) + ")";
        case Op::sin: return "sin(" + print(e.arg(0)) + ")";
        case Op::cos: return "cos(" + print(e.arg(0)) + ")";
    }
    return "?";
}

}  // namespace

Expr parse_expr(std::string_view text) {
    ExprParser p{text};
    Expr e = p.expr();
    p.ws();
    if (p.i != text.size()) throw SyntaxError("trailing input in expression", p.i);
    return e;
}

std::string to_string(const Expr& e) {
    return print(e);
}

// ---- evaluation ----

namespace {

LCNum maclaurin(Expr::Op fn, const LCNum& x, const EvalOptions& opt) {
    // exp: sum x^n/n!; sin/cos pick odd/even n with alternating sign
    LCNum sum, power = LCNum::from_rational(1);
    Rational fact = 1;
    for (int n = 0; n < opt.series_terms; ++n) {
        if (n > 0) {
            power = power * x;
            fact *= n;
        }
        Rational c;
        if (fn == Expr::Op::exp)
            c = Rational(1) / fact;
        else if (fn == Expr::Op::sin)
            c = n % 2 == 1 ? Rational((n / 2) % 2 ? -1 : 1) / fact : Rational(0);
        else
            c = n % 2 == 0 ? Rational((n / 2) % 2 ? -1 : 1) / fact : Rational(0);
        if (c != 0) sum = sum + LCNum::from_rational(c) * power;
    }
    return sum;
}

}  // namespace

LCNum eval_expr(const Expr& e, const Env& env, const EvalOptions& opt) {
    using Op = Expr::Op;
    switch (e.op()) {
        case Op::constant: return LCNum::from_rational(e.value());
        case Op::variable: {
            auto it = env.find(e.name());
            if (it == env.end()) throw DomainError("unbound-variable", "no value for '" + e.name() + "'");
            return it->second;
        }
        case Op::add: return eval_expr(e.arg(0), env, opt) + eval_expr(e.arg(1), env, opt);
        case Op::sub: return eval_expr(e.arg(0), env, opt) - eval_expr(e.arg(1), env, opt);
        case Op::mul: return eval_expr(e.arg(0), env, opt) * eval_expr(e.arg(1), env, opt);
        case Op::div: return LCNum::divide(eval_expr(e.arg(0), env, opt), eval_expr(e.arg(1), env, opt), opt.order);
        case Op::neg: return -eval_expr(e.arg(0), env, opt);
        case Op::pow: return LCNum::pow(eval_expr(e.arg(0), env, opt), e.exponent(), opt.order);
        case Op::exp:
        case Op::sin:
        case Op::cos: return maclaurin(e.op(), eval_expr(e.arg(0), env, opt), opt);
    }
    throw DomainError("internal", "bad expression node");
}

// ---- polynomials ----

Poly poly_trim(Poly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

namespace {

Poly poly_add(const Poly& a, const Poly& b, int sign = 1) {
    Poly r(std::max(a.size(), b.size()), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += sign * b[i];
    return poly_trim(r);
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return poly_trim(r);
}

}  // namespace

std::optional<Poly> as_polynomial(const Expr& e, const std::string& var) {
    using Op = Expr::Op;
    switch (e.op()) {
        case Op::constant: return poly_trim({e.value()});
        case Op::variable:
            if (e.name() != var) return std::nullopt;
            return Poly{0, 1};
        case Op::add:
        case Op::sub:
        case Op::mul: {
            auto a = as_polynomial(e.arg(0), var);
            auto b = as_polynomial(e.arg(1), var);
            if (!a || !b) return std::nullopt;
            if (e.op() == Op::mul) return poly_mul(*a, *b);
            return poly_add(*a, *b, e.op() == Op::add ? 1 : -1);
        }
        case Op::div: {
            auto a = as_polynomial(e.arg(0), var);
            auto b = as_polynomial(e.arg(1), var);
            if (!a || !b || b->size() != 1) return std::nullopt;  // constant nonzero divisor only
            for (auto& c : *a) c /= (*b)[0];
            return a;
        }
        case Op::neg: {
            auto a = as_polynomial(e.arg(0), var);
            if (!a) return std::nullopt;
            for (auto& c : *a) c = -c;
            return a;
        }
        case Op::pow: {
            if (e.exponent() < 0) return std::nullopt;
            auto a = as_polynomial(e.arg(0), var);
            if (!a) return std::nullopt;
            Poly r{1};
            for (long k = 0; k < e.exponent(); ++k) r = poly_mul(r, *a);
            return r;
        }
        default: return std::nullopt;
    }
}

Rational poly_eval(const Poly& p, const Rational& x) {
    Rational r = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
    return r;
}

Poly poly_derivative(const Poly& p) {
    Poly d;
    for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * Rational(static_cast<long>(k)));
    return poly_trim(d);
}

Expr poly_to_expr(const Poly& p, const std::string& var) {
    std::optional<Expr> out;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0) continue;
        Expr term = Expr::constant(p[k]);
        if (k == 1) term = term * Expr::variable(var);
        if (k > 1) term = term * Expr::power(Expr::variable(var), static_cast<long>(k));
        out = out ? *out + term : term;
    }
    return out ? *out : Expr::constant(0);
}

}  // namespace hyperlab
