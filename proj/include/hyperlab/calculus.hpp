#pragma once

#include "hyperlab/expr.hpp"
#include "hyperlab/lcnum.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hyperlab {

// Polynomial in the step h and the endpoint offsets ta, tb (both in [0,1]).
// Closed forms of hyperfinite sums are carried in this ring, so the unknown
// position of a and b between grid points stays symbolic.
class StepPoly {
public:
    enum Var { h = 0, ta = 1, tb = 2 };
    using Mono = std::array<int, 3>;

    StepPoly() = default;
    static StepPoly constant(const Rational& c);
    static StepPoly var(Var v);

    StepPoly operator+(const StepPoly& o) const;
    StepPoly operator-(const StepPoly& o) const;
    StepPoly operator*(const StepPoly& o) const;
    StepPoly scaled(const Rational& c) const;
    StepPoly pow(int n) const;

    const std::map<Mono, Rational>& terms() const { return terms_; }
    // Sum of the h^0 coefficients; throws if any of them still mentions ta/tb.
    Rational standard_part() const;
    LCNum substitute(const LCNum& hval, const Rational& ta_val, const Rational& tb_val) const;

private:
    std::map<Mono, Rational> terms_;
};

std::string to_string(const StepPoly& p);

// ---- derivative ----

std::vector<LCNum> default_h_choices();  // eps, eps^2, 2eps, -eps

Rational derivative_at(const Expr& f, const Rational& c, const std::vector<LCNum>& h_choices = default_h_choices(),
                       const EvalOptions& opt = {});

// ---- Riemann integral ----

struct SymbolicIntegral {
    Rational value;
    StepPoly closed_form;            // the Riemann sum as a polynomial in h, ta, tb
    std::vector<LCNum> samples;      // closed form at h = eps, eps^2, 2eps with ta = tb = 1/2
};

struct NumericEstimate {
    Rational value;
    std::optional<double> observed_order;  // from successive trapezoid differences
    Rational final_increment;
    int levels = 0;
};

struct NumericOptions {
    int max_level = 14;
    Rational tolerance = Rational(1, 10000000000LL);
    EvalOptions eval;
};

enum class TagScheme { left, right, midpoint };
const char* to_string(TagScheme s);

SymbolicIntegral riemann_integral_symbolic(const Expr& f, const Rational& a, const Rational& b,
                                           TagScheme tags = TagScheme::left);
NumericEstimate riemann_integral_numeric(const Expr& f, const Rational& a, const Rational& b,
                                         const NumericOptions& opt = {});
bool tagged_sum_check(const Expr& f, const Rational& a, const Rational& b, TagScheme scheme);

// ---- Euler polygon ----

struct Vertex {
    Rational x, y;
};
using Polyline = std::vector<Vertex>;

Polyline peano_euler(const Expr& f, const Rational& h, const Rational& x_max, const EvalOptions& opt = {});

struct PeanoPoint {
    Rational x;
    std::vector<Rational> values;         // y at x for h0, h0/2, ...
    Rational extrapolated;                // Richardson in powers of h
    std::vector<std::optional<Rational>> ratios;  // successive difference ratios, ~2 for a first-order method
};

std::vector<PeanoPoint> peano_study(const Expr& f, const Rational& h0, const Rational& x_max, int levels,
                                    const EvalOptions& opt = {});

// ---- measure ----

struct Interval {
    Rational a, b;
};

class IntervalUnion {
public:
    IntervalUnion() = default;
    // Requires sorted, disjoint (b_i < a_{i+1}) intervals with a <= b.
    static IntervalUnion make(std::vector<Interval> pieces);
    // Any intervals; overlapping or touching ones are merged.
    static IntervalUnion merge(std::vector<Interval> pieces);

    const std::vector<Interval>& pieces() const { return pieces_; }
    Rational length() const;
    bool contains(const IntervalUnion& other) const;

private:
    std::vector<Interval> pieces_;
};

IntervalUnion parse_interval_union(std::string_view text);
std::string to_string(const IntervalUnion& u);
IntervalUnion unite(const IntervalUnion& x, const IntervalUnion& y);

struct PieceCover {
    Interval piece;
    StepPoly cover_length;  // |A|*h for the grid points inside the piece
};

struct MeasureReport {
    Rational outer, inner;
    std::vector<PieceCover> covers;
};

MeasureReport lebesgue_measures(const IntervalUnion& e);

// Bounds for the part of a countable family that is not listed explicitly.
struct TailCertificate {
    Rational union_extra_upper;  // outer measure the tail adds beyond the listed union
    Rational sum_lower;          // lower bound for the sum of tail measures
};

struct SubaddReport {
    Rational union_measure;   // of the listed members
    Rational sum_measures;    // of the listed members
    std::vector<Rational> slack;  // eps/2^(n+1) per listed member
    Rational lhs, rhs;
    bool passes = false;
};

SubaddReport sigma_subadd_check(const std::vector<IntervalUnion>& family, const TailCertificate& tail,
                                const Rational& eps);

// E_n = [n, n + 2^(-n-1)] for n < count, with the exact geometric tail.
std::pair<std::vector<IntervalUnion>, TailCertificate> geometric_family(int count);

// ---- Frechet ----

struct FrechetDirection {
    std::vector<Rational> d;
    LCNum ratio;
    Magnitude magnitude;
};

struct FrechetReport {
    bool holds = false;
    bool sampled_directions_only = true;  // z = eps*d for the listed d, not every z
    std::vector<FrechetDirection> directions;
};

FrechetReport frechet_check(const std::vector<std::vector<Rational>>& A, const std::vector<Expr>& f,
                            const std::vector<std::string>& vars, const std::vector<Rational>& x,
                            const std::vector<std::vector<Rational>>& directions, const EvalOptions& opt = {});

}  // namespace hyperlab
