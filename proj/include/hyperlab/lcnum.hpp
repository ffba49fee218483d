#pragma once

#include "hyperlab/rational.hpp"

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hyperlab {

inline constexpr long kDefaultTrunc = 8;

struct Term {
    Rational exp;
    Rational coef;
    bool operator==(const Term&) const = default;
};

enum class Magnitude { zero, infinitesimal, limited_appreciable, unlimited };
const char* to_string(Magnitude m);

// Element of the truncated Levi-Civita field: a finite sum of c*eps^q with
// strictly increasing rational q. When trunc is set, everything at exponent
// >= trunc is unknown.
class LCNum {
public:
    LCNum() = default;

    static LCNum from_rational(const Rational& r);
    static LCNum epsilon();
    static LCNum monomial(const Rational& coef, const Rational& exp);
    // Builds from arbitrary terms: sorts, merges equal exponents, drops zeros
    // and everything at or above trunc.
    static LCNum from_terms(std::vector<Term> terms, std::optional<Rational> trunc = std::nullopt);

    const std::vector<Term>& terms() const noexcept { return terms_; }
    const std::optional<Rational>& trunc() const noexcept { return trunc_; }

    bool is_exact() const noexcept { return !trunc_; }
    bool is_exact_zero() const noexcept { return terms_.empty() && !trunc_; }
    bool is_standard() const noexcept;  // exact rational embed
    // Leading exponent; the truncation order stands in when no term is known.
    std::optional<Rational> leading_exp() const;
    Rational coef_at(const Rational& exp) const;

    LCNum operator-() const;
    friend LCNum operator+(const LCNum& a, const LCNum& b);
    friend LCNum operator-(const LCNum& a, const LCNum& b);
    friend LCNum operator*(const LCNum& a, const LCNum& b);
    friend LCNum operator/(const LCNum& a, const LCNum& b) { return divide(a, b, kDefaultTrunc); }

    // Series-producing operations take the absolute cutoff exponent `order`.
    static LCNum divide(const LCNum& a, const LCNum& b, long order = kDefaultTrunc);
    static LCNum inverse(const LCNum& b, long order = kDefaultTrunc);
    static LCNum pow(const LCNum& a, long n, long order = kDefaultTrunc);

    LCNum with_trunc(const Rational& t) const;

    bool operator==(const LCNum& other) const = default;  // structural

private:
    std::vector<Term> terms_;
    std::optional<Rational> trunc_;
};

// Throws DomainError("indeterminate") when a - b vanishes below a finite trunc.
std::strong_ordering compare(const LCNum& a, const LCNum& b);
int sign(const LCNum& a);
LCNum abs(const LCNum& a);

Magnitude classify(const LCNum& a);
Rational shadow(const LCNum& a);
bool approx(const LCNum& a, const LCNum& b);

std::string to_string(const LCNum& a);
LCNum parse_lcnum(std::string_view text);

Rational decimal_encode(const std::vector<int>& bits);
std::vector<int> decimal_decode(const Rational& r, std::size_t n);

}  // namespace hyperlab
