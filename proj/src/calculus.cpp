#include "hyperlab/calculus.hpp"

#include "hyperlab/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace hyperlab {

// ---- StepPoly ----

StepPoly StepPoly::constant(const Rational& c) {
    StepPoly p;
    if (c != 0) p.terms_[{0, 0, 0}] = c;
    return p;
}

StepPoly StepPoly::var(Var v) {
    StepPoly p;
    Mono m{0, 0, 0};
    m[v] = 1;
    p.terms_[m] = 1;
    return p;
}

StepPoly StepPoly::operator+(const StepPoly& o) const {
    StepPoly r = *this;
    for (const auto& [m, c] : o.terms_) {
        Rational& slot = r.terms_[m];
        slot += c;
        if (slot == 0) r.terms_.erase(m);
    }
    return r;
}

StepPoly StepPoly::operator-(const StepPoly& o) const {
    return *this + o.scaled(-1);
}

StepPoly StepPoly::operator*(const StepPoly& o) const {
    StepPoly r;
    for (const auto& [m1, c1] : terms_)
        for (const auto& [m2, c2] : o.terms_) {
            Mono m{m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2]};
            Rational& slot = r.terms_[m];
            slot += c1 * c2;
            if (slot == 0) r.terms_.erase(m);
        }
    return r;
}

StepPoly StepPoly::scaled(const Rational& c) const {
    StepPoly r;
    if (c == 0) return r;
    for (const auto& [m, v] : terms_) r.terms_[m] = v * c;
    return r;
}

StepPoly StepPoly::pow(int n) const {
    StepPoly r = constant(1);
    for (int k = 0; k < n; ++k) r = r * *this;
    return r;
}

Rational StepPoly::standard_part() const {
    Rational s = 0;
    for (const auto& [m, c] : terms_) {
        if (m[0] != 0) continue;
        if (m[1] != 0 || m[2] != 0)
            throw DomainError("internal", "endpoint offset survives without a factor of h");
        s += c;
    }
    return s;
}

LCNum StepPoly::substitute(const LCNum& hval, const Rational& ta_val, const Rational& tb_val) const {
    LCNum out;
    for (const auto& [m, c] : terms_) {
        Rational coef = c * hyperlab::pow(ta_val, m[1]) * hyperlab::pow(tb_val, m[2]);
        out = out + LCNum::from_rational(coef) * LCNum::pow(hval, m[0]);
    }
    return out;
}

std::string to_string(const StepPoly& p) {
    static const char* names[] = {"h", "ta", "tb"};
    if (p.terms().empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        bool neg = c < 0;
        out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
        first = false;
        Rational a = abs(c);
        bool unit = a == 1 && (m[0] || m[1] || m[2]);
        if (!unit) out += to_string(a);
        bool need_star = !unit;
        for (int v = 0; v < 3; ++v) {
            if (!m[v]) continue;
            if (need_star) out += "*";
            out += names[v];
            if (m[v] > 1) out += "^" + std::to_string(m[v]);
            need_star = true;
        }
    }
    return out;
}

// ---- derivative ----

std::vector<LCNum> default_h_choices() {
    LCNum e = LCNum::epsilon();
    return {e, e * e, LCNum::from_rational(2) * e, -e};
}

namespace {

std::string single_var(const Expr& f, const char* fallback) {
    auto vars = f.free_vars();
    if (vars.size() > 1) throw DomainError("not-univariate", "expression has several free variables");
    return vars.empty() ? std::string(fallback) : *vars.begin();
}

}  // namespace

Rational derivative_at(const Expr& f, const Rational& c, const std::vector<LCNum>& h_choices, const EvalOptions& opt) {
    if (h_choices.empty()) throw DomainError("no-h-choices", "derivative needs at least one infinitesimal");
    const std::string v = single_var(f, "x");
    const LCNum cc = LCNum::from_rational(c);
    const LCNum fc = eval_expr(f, {{v, cc}}, opt);
    std::optional<Rational> common;
    std::string witnesses;
    for (const auto& h : h_choices) {
        if (classify(h) != Magnitude::infinitesimal)
            throw DomainError("not-infinitesimal", "h = " + to_string(h) + " is not a nonzero infinitesimal");
        LCNum q = LCNum::divide(eval_expr(f, {{v, cc + h}}, opt) - fc, h, opt.order);
        if (classify(q) == Magnitude::unlimited)
            throw DomainError("not-differentiable", "difference quotient " + to_string(q) + " is unlimited");
        Rational s = shadow(q);
        if (!approx(q, LCNum::from_rational(s)))
            throw DomainError("not-differentiable", "quotient not infinitely close to its shadow");
        witnesses += " h=" + to_string(h) + " -> " + to_string(s) + ";";
        if (common && *common != s) throw DomainError("not-differentiable", "shadows disagree:" + witnesses);
        common = s;
    }
    return *common;
}

// ---- Riemann sums ----

const char* to_string(TagScheme s) {
    switch (s) {
        case TagScheme::left: return "left";
        case TagScheme::right: return "right";
        case TagScheme::midpoint: return "midpoint";
    }
    return "?";
}

namespace {

Rational binom(int n, int k) {
    Rational r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// B_j with B_1 = +1/2
std::vector<Rational> bernoulli_plus(int n) {
    std::vector<Rational> b(n + 1, Rational(0));
    b[0] = 1;
    for (int m = 1; m <= n; ++m) {
        Rational s = 0;
        for (int j = 0; j < m; ++j) s += binom(m + 1, j) * b[j];
        b[m] = -s / (m + 1);
    }
    if (n >= 1) b[1] = Rational(1, 2);
    return b;
}

// Coefficients of S_k(n) = sum_{i=1}^n i^k as a polynomial in n.
Poly faulhaber(int k) {
    auto b = bernoulli_plus(k);
    Poly p(k + 2, Rational(0));
    for (int j = 0; j <= k; ++j) p[k + 1 - j] = binom(k + 1, j) * b[j] / (k + 1);
    return p;
}

// h * sum_{i = lo..hi} (i h)^r, where lo*h - h = V and hi*h = U.
StepPoly power_sum(int r, const StepPoly& U, const StepPoly& V) {
    const StepPoly H = StepPoly::var(StepPoly::h);
    Poly s = faulhaber(r);
    StepPoly out;
    for (int j = 0; j < static_cast<int>(s.size()); ++j) {
        if (s[j] == 0) continue;
        out = out + ((U.pow(j) - V.pow(j)) * H.pow(r + 1 - j)).scaled(s[j]);
    }
    return out;
}

Poly require_poly(const Expr& f, std::string* var_out) {
    std::string v = single_var(f, "t");
    auto p = as_polynomial(f, v);
    if (!p) throw DomainError("non-polynomial", "symbolic mode needs a polynomial integrand: " + to_string(f));
    if (var_out) *var_out = v;
    return *p;
}

StepPoly poly_at(const Poly& p, const StepPoly& t) {
    StepPoly out;
    for (std::size_t k = 0; k < p.size(); ++k) out = out + t.pow(static_cast<int>(k)).scaled(p[k]);
    return out;
}

}  // namespace

SymbolicIntegral riemann_integral_symbolic(const Expr& f, const Rational& a, const Rational& b, TagScheme tags) {
    if (!(a < b)) throw DomainError("empty-interval", "need a < b");
    Poly p = require_poly(f, nullptr);
    const StepPoly H = StepPoly::var(StepPoly::h);
    // i_a h = a + ta h, i_b h = b - tb h, with 0 <= ta < 1, 0 < tb <= 1
    const StepPoly U = StepPoly::constant(b) - StepPoly::var(StepPoly::tb) * H;
    const StepPoly V = StepPoly::constant(a) + StepPoly::var(StepPoly::ta) * H - H;

    StepPoly sum;
    if (tags == TagScheme::left) {
        for (std::size_t k = 0; k < p.size(); ++k) sum = sum + power_sum(static_cast<int>(k), U, V).scaled(p[k]);
    } else {
        // tags i h + tau h for i < i_b; the last tag stays at i_b h so it is <= b
        const Rational tau = tags == TagScheme::right ? Rational(1) : Rational(1, 2);
        const StepPoly U1 = U - H;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (p[k] == 0) continue;
            for (std::size_t r = 0; r <= k; ++r) {
                Rational c = p[k] * binom(static_cast<int>(k), static_cast<int>(r)) *
                             hyperlab::pow(tau, static_cast<long>(k - r));
                sum = sum + (power_sum(static_cast<int>(r), U1, V) * H.pow(static_cast<int>(k - r))).scaled(c);
            }
        }
        sum = sum + poly_at(p, U) * H;
    }

    SymbolicIntegral out;
    out.closed_form = sum;
    out.value = sum.standard_part();
    const LCNum e = LCNum::epsilon();
    for (const LCNum& h : {e, e * e, LCNum::from_rational(2) * e})
        out.samples.push_back(sum.substitute(h, Rational(1, 2), Rational(1, 2)));
    return out;
}

bool tagged_sum_check(const Expr& f, const Rational& a, const Rational& b, TagScheme scheme) {
    auto plain = riemann_integral_symbolic(f, a, b, TagScheme::left);
    auto tagged = riemann_integral_symbolic(f, a, b, scheme);
    return plain.value == tagged.value;
}

NumericEstimate riemann_integral_numeric(const Expr& f, const Rational& a, const Rational& b,
                                         const NumericOptions& opt) {
    if (!(a < b)) throw DomainError("empty-interval", "need a < b");
    const std::string v = single_var(f, "t");
    auto F = [&](const Rational& x) { return shadow(eval_expr(f, {{v, LCNum::from_rational(x)}}, opt.eval)); };

    std::vector<Rational> trap;                 // trapezoid values per level
    std::vector<std::vector<Rational>> romberg;  // Richardson tableau
    Rational width = b - a;
    trap.push_back(width * (F(a) + F(b)) / 2);
    romberg.push_back({trap.back()});
    for (int j = 1; j <= opt.max_level; ++j) {
        Rational h = width / pow2(j);
        Rational mids = 0;
        long n = 1L << (j - 1);
        for (long i = 0; i < n; ++i) mids += F(a + h * (2 * i + 1));
        trap.push_back(trap.back() / 2 + h * mids);
        std::vector<Rational> row{trap.back()};
        Rational four = 1;
        for (int k = 1; k <= j; ++k) {
            four *= 4;
            row.push_back(row[k - 1] + (row[k - 1] - romberg[j - 1][k - 1]) / (four - 1));
        }
        romberg.push_back(row);
        Rational inc = abs(romberg[j][j] - romberg[j - 1][j - 1]);
        if (inc <= opt.tolerance) {
            NumericEstimate est;
            est.value = romberg[j][j];
            est.final_increment = inc;
            est.levels = j;
            if (j >= 2) {
                Rational d1 = abs(trap[j - 1] - trap[j - 2]), d2 = abs(trap[j] - trap[j - 1]);
                if (d1 != 0 && d2 != 0) est.observed_order = std::log2(to_double(d1 / d2));
            }
            return est;
        }
    }
    throw DomainError("no-convergence", "Richardson table did not settle within " + std::to_string(opt.max_level) +
                                            " halvings");
}

// ---- Euler polygon ----

Polyline peano_euler(const Expr& f, const Rational& h, const Rational& x_max, const EvalOptions& opt) {
    if (h <= 0) throw DomainError("bad-step", "h must be positive");
    if (x_max <= 0) throw DomainError("bad-range", "x_max must be positive");
    for (const auto& v : f.free_vars())
        if (v != "x" && v != "y") throw DomainError("unbound-variable", "slope field may use only x and y, got " + v);
    Polyline out{{0, 0}};
    Rational x = 0, y = 0;
    while (x < x_max) {
        LCNum s = eval_expr(f, {{"x", LCNum::from_rational(x)}, {"y", LCNum::from_rational(y)}}, opt);
        y += h * shadow(s);
        x += h;
        out.push_back({x, y});
    }
    return out;
}

std::vector<PeanoPoint> peano_study(const Expr& f, const Rational& h0, const Rational& x_max, int levels,
                                    const EvalOptions& opt) {
    if (levels < 1) throw DomainError("bad-levels", "need at least one level");
    std::vector<Polyline> runs;
    for (int j = 0; j < levels; ++j) runs.push_back(peano_euler(f, h0 / pow2(j), x_max, opt));

    std::vector<PeanoPoint> out;
    for (std::size_t k = 0; k < runs[0].size(); ++k) {
        PeanoPoint pt;
        pt.x = runs[0][k].x;
        for (int j = 0; j < levels; ++j) pt.values.push_back(runs[j][k << j].y);
        // Richardson for an error expansion in powers of h
        std::vector<Rational> col = pt.values;
        for (int m = 1; m < levels; ++m) {
            Rational two_m = pow2(m);
            for (int j = levels - 1; j >= m; --j) col[j] = (two_m * col[j] - col[j - 1]) / (two_m - 1);
        }
        pt.extrapolated = col.back();
        for (int j = 2; j < levels; ++j) {
            Rational num = pt.values[j - 1] - pt.values[j - 2], den = pt.values[j] - pt.values[j - 1];
            pt.ratios.push_back(den == 0 ? std::nullopt : std::optional<Rational>(num / den));
        }
        out.push_back(std::move(pt));
    }
    return out;
}

// ---- intervals and measure ----

IntervalUnion IntervalUnion::make(std::vector<Interval> pieces) {
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (pieces[i].b < pieces[i].a) throw DomainError("bad-interval", "interval with b < a");
        if (i && !(pieces[i - 1].b < pieces[i].a))
            throw DomainError("bad-interval", "intervals must be sorted and pairwise disjoint");
    }
    IntervalUnion u;
    u.pieces_ = std::move(pieces);
    return u;
}

IntervalUnion IntervalUnion::merge(std::vector<Interval> pieces) {
    for (const auto& p : pieces)
        if (p.b < p.a) throw DomainError("bad-interval", "interval with b < a");
    std::sort(pieces.begin(), pieces.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
    IntervalUnion u;
    for (const auto& p : pieces) {
        if (!u.pieces_.empty() && p.a <= u.pieces_.back().b)
            u.pieces_.back().b = std::max(u.pieces_.back().b, p.b);
        else
            u.pieces_.push_back(p);
    }
    return u;
}

Rational IntervalUnion::length() const {
    Rational s = 0;
    for (const auto& p : pieces_) s += p.b - p.a;
    return s;
}

bool IntervalUnion::contains(const IntervalUnion& other) const {
    for (const auto& q : other.pieces_) {
        bool inside = false;
        for (const auto& p : pieces_)
            if (p.a <= q.a && q.b <= p.b) inside = true;
        if (!inside) return false;
    }
    return true;
}

IntervalUnion unite(const IntervalUnion& x, const IntervalUnion& y) {
    std::vector<Interval> all = x.pieces();
    all.insert(all.end(), y.pieces().begin(), y.pieces().end());
    return IntervalUnion::merge(std::move(all));
}

IntervalUnion parse_interval_union(std::string_view text) {
    std::vector<Interval> pieces;
    std::size_t i = 0;
    auto ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    ws();
    if (text.substr(i) == "empty") return {};
    while (true) {
        ws();
        if (i >= text.size() || text[i] != '[') throw SyntaxError("expected '['", i);
        std::size_t comma = text.find(',', i), close = text.find(']', i);
        if (comma == std::string_view::npos || close == std::string_view::npos || comma > close)
            throw SyntaxError("expected '[a,b]'", i);
        Rational a = parse_rational(text.substr(i + 1, comma - i - 1));
        Rational b = parse_rational(text.substr(comma + 1, close - comma - 1));
        pieces.push_back({a, b});
        i = close + 1;
        ws();
        if (i == text.size()) break;
        if (text[i] != '+') throw SyntaxError("expected '+' between intervals", i);
        ++i;
    }
    return IntervalUnion::make(std::move(pieces));
}

std::string to_string(const IntervalUnion& u) {
    if (u.pieces().empty()) return "empty";
    std::string out;
    for (const auto& p : u.pieces()) {
        if (!out.empty()) out += "+";
        out += "[" + to_string(p.a) + "," + to_string(p.b) + "]";
    }
    return out;
}

MeasureReport lebesgue_measures(const IntervalUnion& e) {
    MeasureReport r;
    r.outer = 0;
    const StepPoly H = StepPoly::var(StepPoly::h);
    for (const auto& p : e.pieces()) {
        // grid points in [a,b]: ceil(a/h)h = a + ta h, floor(b/h)h = b - tb h, ta, tb in [0,1)
        StepPoly hi = StepPoly::constant(p.b) - StepPoly::var(StepPoly::tb) * H;
        StepPoly lo = StepPoly::constant(p.a) + StepPoly::var(StepPoly::ta) * H;
        StepPoly len = hi - lo + H;  // |A| h, off from b - a by at most h in either direction
        r.outer += len.standard_part();
        r.covers.push_back({p, len});
    }
    // the largest grid set inside E is the same minimal cover, so both agree
    r.inner = r.outer;
    return r;
}

SubaddReport sigma_subadd_check(const std::vector<IntervalUnion>& family, const TailCertificate& tail,
                                const Rational& eps) {
    if (eps <= 0) throw DomainError("bad-eps", "eps must be positive");
    SubaddReport r;
    IntervalUnion all;
    r.sum_measures = 0;
    Rational slack_total = 0;
    for (std::size_t n = 0; n < family.size(); ++n) {
        MeasureReport m = lebesgue_measures(family[n]);
        // cover excess is within 2h per piece: infinitesimal, so below any standard slack
        r.slack.push_back(eps / pow2(static_cast<long>(n) + 1));
        slack_total += r.slack.back();
        r.sum_measures += m.outer;
        all = unite(all, family[n]);
    }
    r.union_measure = lebesgue_measures(all).outer;
    const Rational tail_slack = eps - slack_total;  // eps/2^(N+1), left for the unlisted members
    r.lhs = r.union_measure + tail.union_extra_upper;
    r.rhs = r.sum_measures + tail.sum_lower + slack_total + tail_slack;
    r.passes = r.lhs <= r.rhs;
    if (!r.passes)
        throw DomainError("certificate-insufficient",
                          "listed members and tail bounds do not fit within eps = " + to_string(eps));
    return r;
}

std::pair<std::vector<IntervalUnion>, TailCertificate> geometric_family(int count) {
    std::vector<IntervalUnion> fam;
    for (int n = 0; n < count; ++n)
        fam.push_back(IntervalUnion::make({{Rational(n), Rational(n) + pow2(-n - 1)}}));
    Rational rest = pow2(-count);  // sum_{n >= count} 2^(-n-1)
    return {fam, TailCertificate{rest, rest}};
}

// ---- Frechet ----

FrechetReport frechet_check(const std::vector<std::vector<Rational>>& A, const std::vector<Expr>& f,
                            const std::vector<std::string>& vars, const std::vector<Rational>& x,
                            const std::vector<std::vector<Rational>>& directions, const EvalOptions& opt) {
    if (A.size() != f.size() || vars.size() != x.size())
        throw DomainError("dimension-mismatch", "matrix rows must match outputs and variables must match the point");
    for (const auto& row : A)
        if (row.size() != x.size()) throw DomainError("dimension-mismatch", "matrix columns must match the point");

    Env base;
    for (std::size_t i = 0; i < vars.size(); ++i) base[vars[i]] = LCNum::from_rational(x[i]);
    std::vector<LCNum> fx;
    for (const auto& fj : f) fx.push_back(eval_expr(fj, base, opt));

    FrechetReport rep;
    rep.holds = true;
    const LCNum e = LCNum::epsilon();
    for (const auto& d : directions) {
        if (d.size() != x.size()) throw DomainError("dimension-mismatch", "direction has wrong length");
        Rational dnorm = 0;
        for (const auto& di : d) dnorm = std::max(dnorm, abs(di));
        if (dnorm == 0) throw DomainError("zero-direction", "direction must be nonzero");
        Env moved;
        std::vector<LCNum> z;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            z.push_back(LCNum::from_rational(d[i]) * e);
            moved[vars[i]] = base[vars[i]] + z.back();
        }
        LCNum sup;
        for (std::size_t j = 0; j < f.size(); ++j) {
            LCNum az;
            for (std::size_t i = 0; i < x.size(); ++i) az = az + LCNum::from_rational(A[j][i]) * z[i];
            LCNum diff = abs(eval_expr(f[j], moved, opt) - fx[j] - az);
            if (compare(diff, sup) > 0) sup = diff;
        }
        LCNum ratio = LCNum::divide(sup, LCNum::from_rational(dnorm) * e, opt.order);
        Magnitude m = classify(ratio);
        if (m != Magnitude::zero && m != Magnitude::infinitesimal) rep.holds = false;
        rep.directions.push_back({d, ratio, m});
    }
    return rep;
}

}  // namespace hyperlab
