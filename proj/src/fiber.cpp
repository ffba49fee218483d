#include "hyperlab/error.hpp"
#include "hyperlab/forcing.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace hyperlab::forcing {

class FiberImpl {
public:
    virtual ~FiberImpl() = default;
    virtual int rank() const = 0;
    virtual FiberValue at(long i) const = 0;
    virtual long horizon(int R) const = 0;
    virtual long period() const = 0;
    virtual bool generative() const = 0;
    virtual std::optional<long> occurrence_bound(HFSet) const { return std::nullopt; }
    virtual std::string describe() const = 0;
};

int Fiber::rank() const { return impl_->rank(); }
FiberValue Fiber::at(long i) const { return impl_->at(i < 0 ? 0 : i); }
long Fiber::horizon(int R) const { return impl_->horizon(R); }
long Fiber::period() const { return impl_->period(); }
bool Fiber::generative() const { return impl_->generative(); }
std::optional<long> Fiber::occurrence_bound(HFSet x) const { return impl_->occurrence_bound(x); }
std::string Fiber::describe() const { return impl_->describe(); }

namespace {

long term_depth(const HTerm& t) {
    long d = 0;
    for (const auto& a : t->args) d = std::max(d, 1 + term_depth(a));
    return d;
}

long max_offset(const HTerm& t) {
    long o = t->kind == HTermNode::Kind::vn ? std::labs(t->offset) : 0;
    for (const auto& a : t->args) o = std::max(o, max_offset(a));
    return o;
}

// Lower bound c with rank(t(i)) >= i + c for all i; nullopt for terms that do not grow.
std::optional<long> growth(const HTerm& t) {
    switch (t->kind) {
        case HTermNode::Kind::constant: return std::nullopt;
        case HTermNode::Kind::vn: return t->offset;
        case HTermNode::Kind::set:
        case HTermNode::Kind::unite: {
            std::optional<long> best;
            for (const auto& a : t->args)
                if (auto g = growth(a)) best = best ? std::max(*best, *g) : *g;
            if (best && t->kind == HTermNode::Kind::set) ++*best;
            return best;
        }
    }
    return std::nullopt;
}

// Rule terms that mention i settle (relative to constants of rank <= R)
// once vN(i + offset) outranks everything of rank R, with slack for nesting.
long term_horizon(const HTerm& t, int R) {
    if (!mentions_index(t)) return 0;
    return R + 2 + max_offset(t) + 2 * term_depth(t);
}

class TemplateTable : public FiberImpl {
public:
    TemplateTable(int rank, std::vector<ValueTemplate> prelude, std::vector<ValueTemplate> period)
        : rank_(rank), prelude_(std::move(prelude)), period_(std::move(period)) {
        if (period_.empty()) throw DomainError("empty-period", "fiber needs a nonempty period");
        for (const auto* list : {&prelude_, &period_})
            for (const auto& v : *list) {
                if (v.empty()) throw DomainError("empty-fiber-value", "q(i) must be nonempty");
                for (const auto& t : v) {
                    if (static_cast<int>(t.size()) != rank_)
                        throw DomainError("rank-mismatch", "tuple length differs from rank " + std::to_string(rank_));
                    for (const auto& e : t) generative_ = generative_ || mentions_index(e);
                }
            }
        if (!generative_) {
            for (const auto& v : prelude_) cache_pre_.push_back(eval_value(v, 0));
            for (const auto& v : period_) cache_per_.push_back(eval_value(v, 0));
        }
    }

    int rank() const override { return rank_; }

    FiberValue at(long i) const override {
        long P = static_cast<long>(prelude_.size()), L = static_cast<long>(period_.size());
        if (!generative_) return i < P ? cache_pre_[i] : cache_per_[(i - P) % L];
        return eval_value(i < P ? prelude_[i] : period_[(i - P) % L], i);
    }

    long horizon(int R) const override {
        long P = static_cast<long>(prelude_.size());
        if (!generative_) return P;
        long h = 0;
        for (const auto* list : {&prelude_, &period_})
            for (const auto& v : *list)
                for (const auto& t : v)
                    for (const auto& e : t) h = std::max(h, term_horizon(e, R));
        return P + h;
    }

    long period() const override { return static_cast<long>(period_.size()); }
    bool generative() const override { return generative_; }

    std::optional<long> occurrence_bound(HFSet x) const override {
        if (rank_ != 1) return std::nullopt;
        std::optional<long> cmin;
        for (const auto& v : period_)
            for (const auto& t : v) {
                auto g = growth(t[0]);
                if (!g) return std::nullopt;
                cmin = cmin ? std::min(*cmin, *g) : *g;
            }
        long P = static_cast<long>(prelude_.size());
        return std::max(P - 1, x.rank() - *cmin);
    }

    std::string describe() const override {
        auto list = [](const std::vector<ValueTemplate>& vs) {
            std::string s = "[";
            for (std::size_t j = 0; j < vs.size(); ++j) {
                s += j ? ",{" : "{";
                for (std::size_t t = 0; t < vs[j].size(); ++t) {
                    s += t ? ",(" : "(";
                    for (std::size_t c = 0; c < vs[j][t].size(); ++c) s += (c ? "," : "") + to_string(vs[j][t][c]);
                    s += ")";
                }
                s += "}";
            }
            return s + "]";
        };
        return "rank=" + std::to_string(rank_) + " prelude=" + list(prelude_) + " period=" + list(period_);
    }

private:
    int rank_;
    std::vector<ValueTemplate> prelude_, period_;
    bool generative_ = false;
    std::vector<FiberValue> cache_pre_, cache_per_;

    static FiberValue eval_value(const ValueTemplate& v, long i) {
        std::vector<Tuple> tuples;
        for (const auto& t : v) {
            Tuple tup;
            for (const auto& e : t) tup.push_back(eval(e, i));
            tuples.push_back(std::move(tup));
        }
        return make_value(std::move(tuples));
    }
};

class AppendColumn : public FiberImpl {
public:
    AppendColumn(Fiber q, HTerm col) : q_(std::move(q)), col_(std::move(col)) {}
    int rank() const override { return q_.rank() + 1; }
    FiberValue at(long i) const override {
        HFSet x = eval(col_, i);
        std::vector<Tuple> out;
        for (auto t : q_.at(i)) {
            t.push_back(x);
            out.push_back(std::move(t));
        }
        return make_value(std::move(out));
    }
    long horizon(int R) const override { return std::max(q_.horizon(R), term_horizon(col_, R)); }
    long period() const override { return q_.period(); }
    bool generative() const override { return q_.generative() || mentions_index(col_); }
    std::optional<long> occurrence_bound(HFSet x) const override {
        if (q_.rank() != 0) return std::nullopt;
        auto g = growth(col_);
        if (!g) return std::nullopt;
        return std::max(-1L, x.rank() - *g);
    }
    std::string describe() const override { return "append(" + q_.describe() + ", " + to_string(col_) + ")"; }

private:
    Fiber q_;
    HTerm col_;
};

class FilterImpl : public FiberImpl {
public:
    FilterImpl(Fiber q, IndexSet dom, std::function<bool(const Tuple&)> keep, int rank_hint, std::string note)
        : q_(std::move(q)), dom_(std::move(dom)), keep_(std::move(keep)), hint_(rank_hint), note_(std::move(note)) {}
    int rank() const override { return q_.rank(); }
    FiberValue at(long i) const override {
        if (!dom_.contains(i)) return empty_tuple_value(rank());
        std::vector<Tuple> out;
        for (const auto& t : q_.at(i))
            if (keep_(t)) out.push_back(t);
        if (out.empty()) throw DomainError("empty-fiber-value", "filter '" + note_ + "' empties q(" + std::to_string(i) + ")");
        return make_value(std::move(out));
    }
    long horizon(int R) const override { return std::max(q_.horizon(std::max(R, hint_)), dom_.start()); }
    long period() const override { return std::lcm(q_.period(), dom_.period()); }
    bool generative() const override { return q_.generative(); }
    std::optional<long> occurrence_bound(HFSet x) const override {
        auto b = q_.occurrence_bound(x);
        if (!b) return b;
        // Off the domain the value is {<0>}, which puts 0 everywhere there.
        if (x == HFSet() && rank() == 1) {
            bool cofinite = std::all_of(dom_.period_bits().begin(), dom_.period_bits().end(), [](bool v) { return v; });
            if (!cofinite) return std::nullopt;
            return std::max(*b, dom_.start() - 1);
        }
        return b;
    }
    std::string describe() const override {
        return "filter(" + q_.describe() + ", " + to_string(dom_) + ", " + note_ + ")";
    }

private:
    Fiber q_;
    IndexSet dom_;
    std::function<bool(const Tuple&)> keep_;
    int hint_;
    std::string note_;
};

class StaircaseImpl : public FiberImpl {
public:
    StaircaseImpl(std::vector<long> bounds, std::vector<Fiber> stages) : bounds_(std::move(bounds)), stages_(std::move(stages)) {
        if (bounds_.empty() || bounds_.size() != stages_.size())
            throw DomainError("bad-staircase", "one bound per stage required");
        if (!std::is_sorted(bounds_.begin(), bounds_.end())) throw DomainError("bad-staircase", "bounds must increase");
        for (const auto& s : stages_)
            if (s.rank() != stages_[0].rank()) throw DomainError("rank-mismatch", "staircase stages differ in rank");
    }
    int rank() const override { return stages_[0].rank(); }
    FiberValue at(long i) const override {
        auto it = std::upper_bound(bounds_.begin(), bounds_.end(), i);
        std::size_t j = it == bounds_.begin() ? 0 : static_cast<std::size_t>(it - bounds_.begin()) - 1;
        return stages_[j].at(i);
    }
    long horizon(int R) const override { return std::max(bounds_.back(), stages_.back().horizon(R)); }
    long period() const override { return stages_.back().period(); }
    bool generative() const override {
        return std::any_of(stages_.begin(), stages_.end(), [](const Fiber& f) { return f.generative(); });
    }
    std::string describe() const override {
        std::string s = "staircase(bounds=[";
        for (std::size_t j = 0; j < bounds_.size(); ++j) s += (j ? "," : "") + std::to_string(bounds_[j]);
        return s + "], tail=" + stages_.back().describe() + ")";
    }

private:
    std::vector<long> bounds_;
    std::vector<Fiber> stages_;
};

class ProjectImpl : public FiberImpl {
public:
    ProjectImpl(Fiber q, std::vector<int> sigma) : q_(std::move(q)), sigma_(std::move(sigma)) {
        std::vector<int> seen = sigma_;
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
            throw DomainError("index-out-of-range", "projection indices must be distinct");
        for (int s : sigma_)
            if (s < 0 || s >= q_.rank())
                throw DomainError("index-out-of-range", "coordinate " + std::to_string(s) + " of rank " + std::to_string(q_.rank()));
    }
    int rank() const override { return static_cast<int>(sigma_.size()); }
    FiberValue at(long i) const override {
        std::vector<Tuple> out;
        for (const auto& t : q_.at(i)) {
            Tuple u;
            for (int s : sigma_) u.push_back(t[s]);
            out.push_back(std::move(u));
        }
        return make_value(std::move(out));
    }
    long horizon(int R) const override { return q_.horizon(R); }
    long period() const override { return q_.period(); }
    bool generative() const override { return q_.generative(); }
    std::optional<long> occurrence_bound(HFSet x) const override {
        if (sigma_.size() == 1 && q_.rank() == 1) return q_.occurrence_bound(x);
        return std::nullopt;
    }
    std::string describe() const override {
        std::string s = "project(" + q_.describe() + ", <";
        for (std::size_t j = 0; j < sigma_.size(); ++j) s += (j ? "," : "") + std::to_string(sigma_[j]);
        return s + ">)";
    }

private:
    Fiber q_;
    std::vector<int> sigma_;
};

long members_per_period(const IndexSet& s) {
    return std::count(s.period_bits().begin(), s.period_bits().end(), true);
}

void check_reindexing(const Reindexing& g) {
    if (!g.dom.unbounded() || !g.target.unbounded())
        throw DomainError("bounded-index-set", "reindexing needs unbounded domain and target");
}

// First index from which gamma's image lies past x, and the period of gamma
// composed with anything of period L.
long reindex_horizon(const Reindexing& g, long x) {
    return std::max(g.dom.start(), g.dom.nth(g.target.count_below(std::max(x, g.target.start()))));
}
long reindex_period(const Reindexing& g, long L) {
    return g.dom.period() * members_per_period(g.target) * L;
}

class ReindexImpl : public FiberImpl {
public:
    ReindexImpl(Fiber q, Reindexing g) : q_(std::move(q)), g_(std::move(g)) { check_reindexing(g_); }
    int rank() const override { return q_.rank(); }
    FiberValue at(long i) const override { return q_.at(g_(i)); }
    long horizon(int R) const override { return reindex_horizon(g_, q_.horizon(R)); }
    long period() const override { return reindex_period(g_, q_.period()); }
    bool generative() const override { return q_.generative(); }
    std::string describe() const override {
        return "reindex(" + q_.describe() + ", dom=" + to_string(g_.dom) + ", target=" + to_string(g_.target) + ")";
    }

private:
    Fiber q_;
    Reindexing g_;
};

class ProductImpl : public FiberImpl {
public:
    ProductImpl(Fiber a, Fiber b) : a_(std::move(a)), b_(std::move(b)) {}
    int rank() const override { return a_.rank() + b_.rank(); }
    FiberValue at(long i) const override {
        std::vector<Tuple> out;
        auto bv = b_.at(i);
        for (const auto& x : a_.at(i))
            for (const auto& y : bv) {
                Tuple t = x;
                t.insert(t.end(), y.begin(), y.end());
                out.push_back(std::move(t));
            }
        return make_value(std::move(out));
    }
    long horizon(int R) const override { return std::max(a_.horizon(R), b_.horizon(R)); }
    long period() const override { return std::lcm(a_.period(), b_.period()); }
    bool generative() const override { return a_.generative() || b_.generative(); }
    std::string describe() const override { return "product(" + a_.describe() + ", " + b_.describe() + ")"; }

private:
    Fiber a_, b_;
};

ValueTemplate constant_template(const FiberValue& v) {
    ValueTemplate out;
    for (const auto& t : v) {
        TupleTemplate tt;
        for (const auto& x : t) tt.push_back(hconst(x));
        out.push_back(std::move(tt));
    }
    return out;
}

}  // namespace

Fiber tabular(int rank, std::vector<FiberValue> prelude, std::vector<FiberValue> period) {
    std::vector<ValueTemplate> pre, per;
    for (const auto& v : prelude) pre.push_back(constant_template(v));
    for (const auto& v : period) per.push_back(constant_template(v));
    return templated(rank, std::move(pre), std::move(per));
}

Fiber templated(int rank, std::vector<ValueTemplate> prelude, std::vector<ValueTemplate> period) {
    if (rank < 0) throw DomainError("rank-mismatch", "negative rank");
    return Fiber(std::make_shared<TemplateTable>(rank, std::move(prelude), std::move(period)));
}

Fiber one_point_one() { return tabular(0, {}, {{Tuple{}}}); }

Fiber append_column(const Fiber& q, HTerm col) { return Fiber(std::make_shared<AppendColumn>(q, std::move(col))); }

Fiber filter(const Fiber& q, const IndexSet& dom, std::function<bool(const Tuple&)> keep, int rank_hint,
             std::string note) {
    return Fiber(std::make_shared<FilterImpl>(q, dom, std::move(keep), rank_hint, std::move(note)));
}

Fiber staircase(std::vector<long> bounds, std::vector<Fiber> stages) {
    return Fiber(std::make_shared<StaircaseImpl>(std::move(bounds), std::move(stages)));
}

long Reindexing::operator()(long i) const {
    if (!dom.contains(i)) return 0;
    return target.nth(dom.count_below(i));
}

Fiber restrict_rank(const Fiber& q, int l) {
    if (l < 0 || l > q.rank()) throw DomainError("index-out-of-range", "restriction beyond rank");
    std::vector<int> sigma(l);
    std::iota(sigma.begin(), sigma.end(), 0);
    return project(q, sigma);
}

Fiber project(const Fiber& q, const std::vector<int>& sigma) { return Fiber(std::make_shared<ProjectImpl>(q, sigma)); }

Fiber reindex(const Fiber& q, const Reindexing& gamma) { return Fiber(std::make_shared<ReindexImpl>(q, gamma)); }

Fiber amalgamate(const Fiber& q, const Reindexing& gamma) {
    return Fiber(std::make_shared<ProductImpl>(q, reindex(q, gamma)));
}

Fiber materialize(const Fiber& q) {
    if (q.generative()) throw DomainError("generative-fiber", "cannot tabulate a growing fiber");
    long P = q.horizon(kUniverseRank), L = q.period();
    std::vector<FiberValue> pre, per;
    for (long i = 0; i < P; ++i) pre.push_back(q.at(i));
    for (long i = P; i < P + L; ++i) per.push_back(q.at(i));
    return tabular(q.rank(), std::move(pre), std::move(per));
}

std::string to_string(const Fiber& q) {
    if (q.generative()) return q.describe();
    return materialize(q).describe();
}

// ---- conditions ----

Condition::Condition(IndexSet p_, Fiber q_) : p(std::move(p_)), q(std::move(q_)) {
    if (!p.unbounded()) throw DomainError("bounded-index-set", "condition needs an unbounded p");
}

std::string to_string(const Condition& c) { return "p: " + to_string(c.p) + "\nq: " + to_string(c.q); }

namespace {

class FiberText {
public:
    explicit FiberText(std::string_view s) : s_(s) {}

    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) return ++i_, true;
        return false;
    }
    void expect(char c) {
        if (!eat(c)) throw SyntaxError(std::string("expected '") + c + "'", i_);
    }
    bool at_end() {
        skip();
        return i_ >= s_.size();
    }

    long number() {
        skip();
        if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_]))) throw SyntaxError("expected a number", i_);
        long n = 0;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) n = n * 10 + (s_[i_++] - '0');
        return n;
    }

    HTerm term() {
        skip();
        if (s_.substr(i_, 3) == "vN(") {
            i_ += 3;
            skip();
            if (!eat('i')) throw SyntaxError("vN takes i, i+c or i-c", i_);
            long off = 0;
            if (eat('+')) off = number();
            else if (eat('-')) off = -number();
            expect(')');
            return hvn(off);
        }
        if (s_.substr(i_, 2) == "U(") {
            i_ += 2;
            HTerm a = term();
            expect(',');
            HTerm b = term();
            expect(')');
            return hunion(a, b);
        }
        if (eat('{')) {
            std::vector<HTerm> elems;
            if (eat('}')) return hset({});
            do elems.push_back(term());
            while (eat(','));
            expect('}');
            return hset(std::move(elems));
        }
        long n = number();
        if (n > 64) throw SyntaxError("numeral too large", i_);
        return hconst(HFSet::numeral(n));
    }

    ValueTemplate value() {
        expect('{');
        ValueTemplate v;
        do {
            expect('(');
            TupleTemplate t;
            if (!eat(')')) {
                do t.push_back(term());
                while (eat(','));
                expect(')');
            }
            v.push_back(std::move(t));
        } while (eat(','));
        expect('}');
        return v;
    }

    std::vector<ValueTemplate> list() {
        expect('[');
        std::vector<ValueTemplate> out;
        if (eat(']')) return out;
        do out.push_back(value());
        while (eat(','));
        expect(']');
        return out;
    }

    bool keyword(std::string_view kw) {
        skip();
        if (s_.substr(i_, kw.size()) == kw) return i_ += kw.size(), true;
        return false;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;
};

// Constant rule terms collapse to plain sets so the table evaluates once.
HTerm fold(const HTerm& t) {
    if (!mentions_index(t)) return hconst(eval(t, 0));
    return t;
}

Fiber parse_fiber(std::string_view text) {
    FiberText in(text);
    if (in.keyword("one")) return one_point_one();
    if (!in.keyword("rank=")) throw SyntaxError("fiber needs rank=<k>", 0);
    int rank = static_cast<int>(in.number());
    std::vector<ValueTemplate> pre, per;
    bool have_period = false;
    while (!in.at_end()) {
        if (in.keyword("prelude=")) pre = in.list();
        else if (in.keyword("period=")) per = in.list(), have_period = true;
        else throw SyntaxError("expected prelude= or period=", 0);
    }
    if (!have_period) throw SyntaxError("fiber needs period=[...]", 0);
    for (auto* list : {&pre, &per})
        for (auto& v : *list)
            for (auto& t : v)
                for (auto& e : t) e = fold(e);
    return templated(rank, std::move(pre), std::move(per));
}

}  // namespace

Condition parse_condition(std::string_view text) {
    std::optional<IndexSet> p;
    std::optional<Fiber> q;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::string_view body(line);
        body.remove_prefix(first);
        if (body.rfind("p:", 0) == 0) p = parse_index_set(body.substr(2));
        else if (body.rfind("q:", 0) == 0) q = parse_fiber(body.substr(2));
        else throw SyntaxError("condition lines start with 'p:' or 'q:'", first);
    }
    if (!p) throw SyntaxError("condition needs a 'p:' line", 0);
    return Condition(*p, q ? *q : one_point_one());
}

Window window(const Condition& c, int R) {
    return {std::max(c.p.start(), c.q.horizon(R)), std::lcm(c.p.period(), c.q.period())};
}

namespace {

bool prefix_contained(const Condition& c2, const Condition& c1, long i) {
    if (!c2.p.contains(i)) return true;
    FiberValue v1 = c1.q.at(i);
    std::size_t k = static_cast<std::size_t>(c1.q.rank());
    for (const auto& t : c2.q.at(i)) {
        Tuple pre(t.begin(), t.begin() + k);
        if (!std::binary_search(v1.begin(), v1.end(), pre)) return false;
    }
    return true;
}

}  // namespace

Tri extends(const Condition& c2, const Condition& c1) {
    if (!subset(c2.p, c1.p)) return Tri::no;
    if (c2.q.rank() < c1.q.rank()) return Tri::no;
    long start = std::max({c2.p.start(), c2.q.horizon(kUniverseRank), c1.q.horizon(kUniverseRank)});
    long L = std::lcm(c2.p.period(), std::lcm(c1.q.period(), c2.q.period()));
    bool ok = true;
    for (long i = start; i < start + L && ok; ++i) ok = prefix_contained(c2, c1, i);
    if (!c1.q.generative() && !c2.q.generative()) return ok ? Tri::yes : Tri::no;
    // Rule-level certificate: a later window must agree with the first.
    long shift = L * (1 + 16 / L);
    bool ok2 = true;
    for (long i = start + shift; i < start + shift + L && ok2; ++i) ok2 = prefix_contained(c2, c1, i);
    if (ok != ok2) return Tri::unknown;
    return ok ? Tri::yes : Tri::no;
}

}  // namespace hyperlab::forcing
