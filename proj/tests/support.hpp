#pragma once

#include "hyperlab/error.hpp"
#include "hyperlab/rational.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

using hyperlab::Rational;

// Name of the DomainError thrown by fn, "" when none is thrown.
inline std::string error_name(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const hyperlab::DomainError& e) {
        return e.name();
    }
    return "";
}

// Dense coefficient lists, constant term first. Kept apart from the library's
// own polynomial helpers so the oracles stay independent.
using Coeffs = std::vector<Rational>;

inline Rational horner(const Coeffs& c, const Rational& x) {
    Rational acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

inline Coeffs differentiate(const Coeffs& c) {
    Coeffs d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * Rational(static_cast<long>(k)));
    return d;
}

inline Coeffs antiderivative(const Coeffs& c) {
    Coeffs a{Rational(0)};
    for (std::size_t k = 0; k < c.size(); ++k) a.push_back(c[k] / Rational(static_cast<long>(k + 1)));
    return a;
}

// Text in the expression grammar, variable x.
inline std::string poly_text(const Coeffs& c, const std::string& var = "x") {
    std::string s;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] == 0) continue;
        if (!s.empty()) s += " + ";
        s += "(" + hyperlab::to_string(c[k]) + ")";
        if (k > 0) s += "*" + var + (k > 1 ? "^" + std::to_string(k) : "");
    }
    return s.empty() ? "0" : s;
}

inline Rational random_rational(std::mt19937& rng, int num = 9, int den = 6) {
    std::uniform_int_distribution<int> n(-num, num), d(1, den);
    return Rational(n(rng), d(rng));
}

inline Coeffs random_poly(std::mt19937& rng, int max_degree) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    Coeffs c;
    int d = deg(rng);
    for (int k = 0; k <= d; ++k) c.push_back(random_rational(rng));
    return c;
}

}  // namespace testsupport
