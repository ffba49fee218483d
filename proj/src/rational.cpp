#include "hyperlab/rational.hpp"

#include "hyperlab/error.hpp"

#include <cctype>

namespace hyperlab {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    auto slash = s.find('/');
    std::string_view num = s.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
        throw SyntaxError("not a rational: '" + std::string(text) + "'", 0);
    Integer n{std::string(num)}, d{std::string(den)};
    if (d == 0) throw DomainError("division-by-zero", "zero denominator in '" + std::string(text) + "'");
    Rational r(n, d);
    return neg ? Rational(-r) : r;
}

std::string to_string(const Rational& r) {
    return r.str();
}

Integer floor(const Rational& r) {
    Integer n = boost::multiprecision::numerator(r);
    Integer d = boost::multiprecision::denominator(r);
    Integer q = n / d;  // truncates toward zero
    if (n < 0 && q * d != n) q -= 1;
    return q;
}

Integer ceil(const Rational& r) {
    return -floor(Rational(-r));
}

Rational abs(const Rational& r) {
    return r < 0 ? Rational(-r) : r;
}

Rational pow(const Rational& r, long n) {
    if (n < 0) {
        if (r == 0) throw DomainError("division-by-zero", "zero to a negative power");
        return Rational(1) / pow(r, -n);
    }
    Rational result = 1, base = r;
    for (unsigned long e = static_cast<unsigned long>(n); e; e >>= 1) {
        if (e & 1) result *= base;
        base *= base;
    }
    return result;
}

Rational pow2(long n) {
    return pow(Rational(2), n);
}

bool is_integer(const Rational& r) {
    return boost::multiprecision::denominator(r) == 1;
}

double to_double(const Rational& r) {
    return r.convert_to<double>();
}

}  // namespace hyperlab
