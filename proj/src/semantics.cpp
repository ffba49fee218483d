#include "hyperlab/error.hpp"
#include "hyperlab/formula.hpp"

namespace hyperlab::formula {

using K = Node::Kind;
using TK = TermNode::Kind;

namespace {

bool posint(const LCNum& v) {
    return v.is_standard() && is_integer(shadow(v)) && shadow(v) > 0;
}

class Evaluator {
public:
    Evaluator(const Grids& g, const Interpretation& in, Assignment env) : g_(g), in_(in), env_(std::move(env)) {
        for (const auto& r : g_.standard) standard_.push_back(LCNum::from_rational(r));
        infinitesimal_ = g_.infinitesimal;
        bool has_zero = false;
        for (const auto& x : infinitesimal_) has_zero = has_zero || x.is_exact_zero();
        if (!has_zero) infinitesimal_.push_back(LCNum{});
    }

    bool eval(const Formula& f) {
        switch (f->kind) {
            case K::rel: {
                auto it = in_.relations.find(f->name);
                if (it == in_.relations.end()) throw DomainError("uninterpreted-symbol", f->name);
                return it->second(args(f->terms));
            }
            case K::in: {
                auto it = in_.relations.find("in");
                if (it == in_.relations.end()) throw DomainError("uninterpreted-symbol", "in");
                return it->second(args(f->terms));
            }
            case K::eq: return cmp(f) == 0;
            case K::neq: return cmp(f) != 0;
            case K::lt: return cmp(f) < 0;
            case K::gt: return cmp(f) > 0;
            case K::le: return cmp(f) <= 0;
            case K::ge: return cmp(f) >= 0;
            case K::mag: {
                LCNum v = term(f->terms[1]);
                if (sign(v) <= 0) throw DomainError("bad-magnitude-bound", print(f->terms[1]));
                return compare(abs(term(f->terms[0])) * v, LCNum::from_rational(1)) < 0;
            }
            case K::st: return term(f->terms[0]).is_standard();
            case K::not_: return !eval(f->kids[0]);
            case K::and_: return eval(f->kids[0]) && eval(f->kids[1]);
            case K::or_: return eval(f->kids[0]) || eval(f->kids[1]);
            case K::implies: return !eval(f->kids[0]) || eval(f->kids[1]);
            case K::quant: return quant(f);
        }
        return false;
    }

private:
    const Grids& g_;
    const Interpretation& in_;
    Assignment env_;
    std::vector<LCNum> standard_, infinitesimal_;

    std::vector<LCNum> args(const std::vector<Term>& ts) {
        std::vector<LCNum> out;
        for (const auto& t : ts) out.push_back(term(t));
        return out;
    }

    int cmp(const Formula& f) {
        auto c = compare(term(f->terms[0]), term(f->terms[1]));
        return c < 0 ? -1 : c > 0 ? 1 : 0;
    }

    LCNum term(const Term& t) {
        switch (t->kind) {
            case TK::var: {
                auto it = env_.find(t->name);
                if (it == env_.end()) throw DomainError("unbound-variable", t->name);
                return it->second;
            }
            case TK::num: return LCNum::from_rational(t->value);
            case TK::app: {
                auto it = in_.functions.find(t->name);
                if (it == in_.functions.end()) throw DomainError("uninterpreted-symbol", t->name);
                return it->second(args(t->args));
            }
            case TK::add: return term(t->args[0]) + term(t->args[1]);
            case TK::sub: return term(t->args[0]) - term(t->args[1]);
            case TK::mul: return term(t->args[0]) * term(t->args[1]);
            case TK::div: return term(t->args[0]) / term(t->args[1]);
            case TK::neg: return -term(t->args[0]);
            case TK::pow: return LCNum::pow(term(t->args[0]), t->exponent);
            case TK::set: throw DomainError("uninterpreted-symbol", "set literal " + print(t));
        }
        return {};
    }

    std::vector<LCNum> domain(const Node& q) {
        if (q.bound) {
            auto it = env_.find(*q.bound);
            if (it == env_.end()) throw DomainError("unbound-variable", *q.bound);
            if (!posint(it->second)) throw DomainError("bad-bound", *q.bound + " is not a standard positive integer");
            std::vector<LCNum> out;
            for (Integer i = 1; i <= numerator(shadow(it->second)); ++i) out.push_back(LCNum::from_rational(Rational(i)));
            return out;
        }
        if (is_in(q.q)) return infinitesimal_;
        std::vector<LCNum> base = is_st(q.q) || q.sort == Sort::posint ? standard_ : g_.plain;
        if (q.sort != Sort::posint) return base;
        std::vector<LCNum> out;
        for (const auto& v : base)
            if (posint(v)) out.push_back(v);
        return out;
    }

    bool quant(const Formula& f) {
        std::vector<LCNum> dom = domain(*f);
        bool universal = is_universal(f->q);
        auto saved = env_.find(f->var) != env_.end() ? std::optional<LCNum>(env_[f->var]) : std::nullopt;
        bool result = universal;
        for (const auto& v : dom) {
            env_[f->var] = v;
            if (eval(f->kids[0]) != universal) {
                result = !universal;
                break;
            }
        }
        if (saved) env_[f->var] = *saved;
        else env_.erase(f->var);
        return result;
    }
};

}  // namespace

bool sample_semantics(const Formula& f, const Grids& grids, const Interpretation& interp, const Assignment& env) {
    return Evaluator(grids, interp, env).eval(f);
}

}  // namespace hyperlab::formula
