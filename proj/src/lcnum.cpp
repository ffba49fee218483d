#include "hyperlab/lcnum.hpp"

#include "hyperlab/error.hpp"

#include <algorithm>
#include <cctype>

namespace hyperlab {

const char* to_string(Magnitude m) {
    switch (m) {
        case Magnitude::zero: return "zero";
        case Magnitude::infinitesimal: return "infinitesimal";
        case Magnitude::limited_appreciable: return "limited_appreciable";
        case Magnitude::unlimited: return "unlimited";
    }
    return "?";
}

LCNum LCNum::from_rational(const Rational& r) {
    LCNum x;
    if (r != 0) x.terms_.push_back({Rational(0), r});
    return x;
}

LCNum LCNum::epsilon() {
    return monomial(1, 1);
}

LCNum LCNum::monomial(const Rational& coef, const Rational& exp) {
    LCNum x;
    if (coef != 0) x.terms_.push_back({exp, coef});
    return x;
}

LCNum LCNum::from_terms(std::vector<Term> terms, std::optional<Rational> trunc) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.exp < b.exp; });
    LCNum x;
    x.trunc_ = std::move(trunc);
    for (auto& t : terms) {
        if (x.trunc_ && t.exp >= *x.trunc_) break;
        if (!x.terms_.empty() && x.terms_.back().exp == t.exp) {
            x.terms_.back().coef += t.coef;
            if (x.terms_.back().coef == 0) x.terms_.pop_back();
        } else if (t.coef != 0) {
            x.terms_.push_back(std::move(t));
        }
    }
    return x;
}

bool LCNum::is_standard() const noexcept {
    return !trunc_ && (terms_.empty() || (terms_.size() == 1 && terms_[0].exp == 0));
}

std::optional<Rational> LCNum::leading_exp() const {
    if (!terms_.empty()) return terms_.front().exp;
    return trunc_;
}

Rational LCNum::coef_at(const Rational& exp) const {
    for (const auto& t : terms_)
        if (t.exp == exp) return t.coef;
    return 0;
}

LCNum LCNum::with_trunc(const Rational& t) const {
    std::optional<Rational> nt = trunc_ && *trunc_ < t ? trunc_ : std::optional<Rational>(t);
    return from_terms(terms_, nt);
}

LCNum LCNum::operator-() const {
    LCNum x = *this;
    for (auto& t : x.terms_) t.coef = -t.coef;
    return x;
}

namespace {

std::optional<Rational> min_trunc(const std::optional<Rational>& a, const std::optional<Rational>& b) {
    if (!a) return b;
    if (!b) return a;
    return *a < *b ? a : b;
}

}  // namespace

LCNum operator+(const LCNum& a, const LCNum& b) {
    std::vector<Term> all = a.terms_;
    all.insert(all.end(), b.terms_.begin(), b.terms_.end());
    return LCNum::from_terms(std::move(all), min_trunc(a.trunc_, b.trunc_));
}

LCNum operator-(const LCNum& a, const LCNum& b) {
    return a + (-b);
}

LCNum operator*(const LCNum& a, const LCNum& b) {
    if (a.is_exact_zero() || b.is_exact_zero()) return LCNum();
    std::optional<Rational> trunc;
    // A*O(eps^tb) and B*O(eps^ta); the O*O part is dominated by these.
    if (b.trunc_) trunc = min_trunc(trunc, Rational(*a.leading_exp() + *b.trunc_));
    if (a.trunc_) trunc = min_trunc(trunc, Rational(*b.leading_exp() + *a.trunc_));
    std::vector<Term> out;
    out.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_)
        for (const auto& y : b.terms_) {
            Rational e = x.exp + y.exp;
            if (trunc && e >= *trunc) continue;
            out.push_back({e, x.coef * y.coef});
        }
    return LCNum::from_terms(std::move(out), trunc);
}

LCNum LCNum::inverse(const LCNum& b, long order) {
    if (b.is_exact_zero()) throw DomainError("division-by-zero", "inverse of exact zero");
    if (b.terms_.empty())
        throw DomainError("indeterminate", "inverse of a value with no known terms below eps^" + to_string(*b.trunc_));
    const Rational l = b.terms_.front().exp;
    const Rational c0 = b.terms_.front().coef;
    // b = c0 eps^l (1 + u), u strictly infinitesimal
    std::vector<Term> u;
    for (std::size_t i = 1; i < b.terms_.size(); ++i)
        u.push_back({b.terms_[i].exp - l, b.terms_[i].coef / c0});
    if (u.empty() && !b.trunc_) return monomial(Rational(1) / c0, -l);

    Rational cutoff = order;
    if (b.trunc_) cutoff = std::min(cutoff, Rational(-l + (*b.trunc_ - l)));
    if (cutoff <= -l)
        throw DomainError("truncation-exhausted",
                          "inverse has no representable terms below eps^" + to_string(cutoff));
    const Rational rel = cutoff + l;  // relative precision of the series

    LCNum neg_u = -from_terms(u, rel);
    LCNum power = from_rational(1);
    LCNum sum = power;
    while (true) {
        power = power * neg_u;
        power = from_terms(power.terms_, rel);
        if (power.terms_.empty()) break;
        sum = sum + power;
    }
    std::vector<Term> out;
    for (const auto& t : sum.terms_) out.push_back({t.exp - l, t.coef / c0});
    return from_terms(std::move(out), cutoff);
}

LCNum LCNum::divide(const LCNum& a, const LCNum& b, long order) {
    if (b.is_exact_zero()) throw DomainError("division-by-zero", "division by exact zero");
    LCNum r = a * inverse(b, order);
    if (!r.trunc_ || *r.trunc_ <= order) return r;
    return r.with_trunc(order);
}

LCNum LCNum::pow(const LCNum& a, long n, long order) {
    if (n < 0) return pow(inverse(a, order), -n, order);
    LCNum result = from_rational(1), base = a;
    for (unsigned long e = static_cast<unsigned long>(n); e; e >>= 1) {
        if (e & 1) result = result * base;
        if (e > 1) base = base * base;
    }
    return result;
}

std::strong_ordering compare(const LCNum& a, const LCNum& b) {
    LCNum d = a - b;
    if (!d.terms().empty()) return d.terms().front().coef < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    if (d.trunc())
        throw DomainError("indeterminate", "difference vanishes below eps^" + to_string(*d.trunc()));
    return std::strong_ordering::equal;
}

int sign(const LCNum& a) {
    auto c = compare(a, LCNum());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

LCNum abs(const LCNum& a) {
    return sign(a) < 0 ? -a : a;
}

Magnitude classify(const LCNum& a) {
    if (a.is_exact_zero()) return Magnitude::zero;
    if (a.terms().empty())
        throw DomainError("indeterminate", "no known terms below eps^" + to_string(*a.trunc()));
    const Rational& e = a.terms().front().exp;
    if (e > 0) return Magnitude::infinitesimal;
    if (e == 0) return Magnitude::limited_appreciable;
    return Magnitude::unlimited;
}

Rational shadow(const LCNum& a) {
    if (!a.terms().empty() && a.terms().front().exp < 0)
        throw DomainError("unlimited", "no shadow for " + to_string(a));
    if (a.trunc() && *a.trunc() <= 0)
        throw DomainError("indeterminate", "coefficient at eps^0 lies beyond the truncation");
    return a.coef_at(0);
}

bool approx(const LCNum& a, const LCNum& b) {
    LCNum d = a - b;
    if (!d.terms().empty()) return d.terms().front().exp > 0;
    if (!d.trunc() || *d.trunc() > 0) return true;
    throw DomainError("indeterminate", "difference vanishes below eps^" + to_string(*d.trunc()));
}

std::string to_string(const LCNum& a) {
    std::string out;
    bool first = true;
    for (const auto& t : a.terms()) {
        bool neg = t.coef < 0;
        if (first)
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        out += to_string(abs(t.coef));
        if (t.exp != 0) out += "*eps^" + to_string(t.exp);
        first = false;
    }
    if (a.trunc()) {
        if (!first) out += " + ";
        out += "O(eps^" + to_string(*a.trunc()) + ")";
        first = false;
    }
    return first ? "0" : out;
}

namespace {

struct LCParser {
    std::string_view s;
    std::size_t i = 0;

    void ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(std::string_view tok) {
        ws();
        if (s.substr(i, tok.size()) == tok) {
            i += tok.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view tok) {
        if (!eat(tok)) throw SyntaxError("expected '" + std::string(tok) + "'", i);
    }
    bool at_digit() {
        ws();
        return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
    }
    Integer integer() {
        ws();
        std::size_t b = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (b == i) throw SyntaxError("expected digits", i);
        return Integer(std::string(s.substr(b, i - b)));
    }
    Rational rational() {
        bool neg = eat("-");
        Integer n = integer();
        Integer d = 1;
        if (eat("/")) {
            std::size_t at = i;
            d = integer();
            if (d == 0) throw SyntaxError("zero denominator", at);
        }
        Rational r(n, d);
        return neg ? Rational(-r) : r;
    }
    Rational eps_power() {
        expect("eps");
        if (eat("^")) return rational();
        return 1;
    }
};

}  // namespace

LCNum parse_lcnum(std::string_view text) {
    LCParser p{text};
    std::vector<Term> terms;
    std::optional<Rational> trunc;
    bool first = true;
    while (true) {
        bool neg = false;
        if (first) {
            neg = p.eat("-");
        } else if (p.eat("+")) {
        } else if (p.eat("-")) {
            neg = true;
        } else {
            break;
        }
        first = false;
        if (p.eat("O(")) {
            if (neg || trunc) throw SyntaxError("misplaced O(...) term", p.i);
            trunc = p.eps_power();
            p.expect(")");
            continue;
        }
        Rational c = 1, e = 0;
        if (p.at_digit()) {
            c = p.rational();
            if (p.eat("*")) e = p.eps_power();
        } else {
            e = p.eps_power();
        }
        terms.push_back({e, neg ? Rational(-c) : c});
    }
    p.ws();
    if (p.i != text.size() || first) throw SyntaxError("unexpected input in number", p.i);
    return LCNum::from_terms(std::move(terms), trunc);
}

Rational decimal_encode(const std::vector<int>& bits) {
    Rational x = 0, scale(1, 10);
    for (int b : bits) {
        if (b != 0 && b != 1) throw DomainError("invalid-digit", "encode expects bits 0/1");
        if (b) x += scale;
        scale /= 10;
    }
    return x;
}

std::vector<int> decimal_decode(const Rational& r, std::size_t n) {
    if (r < 0 || r >= 1) throw DomainError("invalid-digit", "value outside [0,1): " + to_string(r));
    std::vector<int> bits;
    Rational x = r;
    for (std::size_t k = 0; k < n; ++k) {
        x *= 10;
        Integer d = floor(x);
        if (d != 0 && d != 1)
            throw DomainError("invalid-digit", "decimal place " + std::to_string(k + 1) + " holds " + d.str());
        bits.push_back(d == 1);
        x -= Rational(d);
    }
    return bits;
}

}  // namespace hyperlab
