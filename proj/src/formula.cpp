#include "hyperlab/formula.hpp"

#include "hyperlab/error.hpp"

#include <cctype>
#include <functional>

namespace hyperlab::formula {

using K = Node::Kind;
using TK = TermNode::Kind;

const char* keyword(QKind k) {
    switch (k) {
        case QKind::all: return "A";
        case QKind::ex: return "E";
        case QKind::all_st: return "Ast";
        case QKind::ex_st: return "Est";
        case QKind::all_in: return "Ain";
        case QKind::ex_in: return "Ein";
    }
    return "?";
}

const char* to_string(Sort s) {
    switch (s) {
        case Sort::posint: return "posint";
        case Sort::real: return "real";
        case Sort::set: return "set";
    }
    return "?";
}

bool is_universal(QKind k) { return k == QKind::all || k == QKind::all_st || k == QKind::all_in; }
bool is_st(QKind k) { return k == QKind::all_st || k == QKind::ex_st; }
bool is_in(QKind k) { return k == QKind::all_in || k == QKind::ex_in; }

Term make_var(std::string name) {
    TermNode n;
    n.kind = TK::var;
    n.name = std::move(name);
    return std::make_shared<const TermNode>(std::move(n));
}

Term make_num(const Rational& v) {
    TermNode n;
    n.kind = TK::num;
    n.value = v;
    return std::make_shared<const TermNode>(std::move(n));
}

namespace {

Term make_term(TK kind, std::vector<Term> args, std::string name = {}, long exponent = 0) {
    TermNode n;
    n.kind = kind;
    n.args = std::move(args);
    n.name = std::move(name);
    n.exponent = exponent;
    return std::make_shared<const TermNode>(std::move(n));
}

Formula make_atom(K kind, std::vector<Term> terms) {
    Node n;
    n.kind = kind;
    n.terms = std::move(terms);
    return std::make_shared<const Node>(std::move(n));
}

Formula make_binary(K kind, Formula a, Formula b) {
    Node n;
    n.kind = kind;
    n.kids = {std::move(a), std::move(b)};
    return std::make_shared<const Node>(std::move(n));
}

}  // namespace

Formula make_rel(std::string name, std::vector<Term> args) {
    Node n;
    n.kind = K::rel;
    n.name = std::move(name);
    n.terms = std::move(args);
    return std::make_shared<const Node>(std::move(n));
}

Formula make_mag(Term t, Term v) { return make_atom(K::mag, {std::move(t), std::move(v)}); }

Formula make_not(Formula a) {
    Node n;
    n.kind = K::not_;
    n.kids = {std::move(a)};
    return std::make_shared<const Node>(std::move(n));
}

Formula make_and(Formula a, Formula b) { return make_binary(K::and_, std::move(a), std::move(b)); }
Formula make_or(Formula a, Formula b) { return make_binary(K::or_, std::move(a), std::move(b)); }
Formula make_implies(Formula a, Formula b) { return make_binary(K::implies, std::move(a), std::move(b)); }

Formula make_quant(QKind q, std::string var, Sort sort, Formula body, std::optional<std::string> bound) {
    Node n;
    n.kind = K::quant;
    n.q = q;
    n.var = std::move(var);
    n.sort = bound ? Sort::posint : sort;
    n.bound = std::move(bound);
    n.kids = {std::move(body)};
    return std::make_shared<const Node>(std::move(n));
}

// ---- lexer / parser ----

namespace {

struct Tok {
    enum Type { ident, number, sym, end } type;
    std::string text;
    std::size_t pos;
};

std::vector<Tok> lex(std::string_view s) {
    std::vector<Tok> out;
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (std::isalpha(c) || c == '_') {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            out.push_back({Tok::ident, std::string(s.substr(start, i - start)), start});
        } else if (std::isdigit(c)) {
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            out.push_back({Tok::number, std::string(s.substr(start, i - start)), start});
        } else {
            static const char* two[] = {"->", "!=", "<=", ">="};
            bool matched = false;
            for (const char* t : two) {
                if (s.substr(i, 2) == t) {
                    out.push_back({Tok::sym, t, start});
                    i += 2;
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            if (std::string_view("()[]{},.:+-*/^=<>!&|").find(static_cast<char>(c)) == std::string_view::npos)
                throw SyntaxError(std::string("unexpected character '") + static_cast<char>(c) + "'", start);
            out.push_back({Tok::sym, std::string(1, static_cast<char>(c)), start});
            ++i;
        }
    }
    out.push_back({Tok::end, "", s.size()});
    return out;
}

std::optional<QKind> quant_keyword(const std::string& s) {
    if (s == "A") return QKind::all;
    if (s == "E") return QKind::ex;
    if (s == "Ast") return QKind::all_st;
    if (s == "Est") return QKind::ex_st;
    if (s == "Ain") return QKind::all_in;
    if (s == "Ein") return QKind::ex_in;
    return std::nullopt;
}

bool reserved(const std::string& s) { return quant_keyword(s) || s == "mag" || s == "st" || s == "in"; }

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(lex(text)) {}

    Formula run() {
        Formula f = implication();
        if (peek().type != Tok::end) fail("unexpected '" + peek().text + "'");
        return f;
    }

private:
    std::vector<Tok> toks_;
    std::size_t i_ = 0;

    const Tok& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
    bool at(const char* sym) const { return peek().type == Tok::sym && peek().text == sym; }
    bool accept(const char* sym) {
        if (!at(sym)) return false;
        ++i_;
        return true;
    }
    void expect(const char* sym) {
        if (!accept(sym)) fail(std::string("expected '") + sym + "'");
    }
    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, peek().pos); }

    std::string identifier(const char* what) {
        if (peek().type != Tok::ident || reserved(peek().text)) fail(std::string("expected ") + what);
        return toks_[i_++].text;
    }

    Formula implication() {
        Formula a = disjunction();
        if (accept("->")) return make_implies(a, implication());
        return a;
    }

    Formula disjunction() {
        Formula a = conjunction();
        while (accept("|")) a = make_or(a, conjunction());
        return a;
    }

    Formula conjunction() {
        Formula a = unary();
        while (accept("&")) a = make_and(a, unary());
        return a;
    }

    Formula unary() {
        if (accept("!")) return make_not(unary());
        if (peek().type == Tok::ident) {
            if (auto q = quant_keyword(peek().text)) {
                ++i_;
                return quantifier(*q);
            }
        }
        return primary();
    }

    Formula quantifier(QKind q) {
        std::string var = identifier("bound variable");
        Sort sort = Sort::real;
        std::optional<std::string> bound;
        if (accept(":")) {
            std::size_t where = peek().pos;
            std::string s = identifier("sort");
            if (s == "posint") sort = Sort::posint;
            else if (s == "real") sort = Sort::real;
            else if (s == "set") sort = Sort::set;
            else throw SyntaxError("unknown sort '" + s + "'", where);
        } else if (accept("<=")) {
            if (q != QKind::all && q != QKind::ex) fail("only plain quantifiers can be bounded");
            bound = identifier("bound");
        }
        if (is_in(q) && sort != Sort::real) fail("infinitesimal quantifiers bind real-sorted variables");
        expect(".");
        return make_quant(q, var, sort, implication(), bound);
    }

    Formula primary() {
        if (peek().type == Tok::ident && peek().text == "mag") {
            ++i_;
            expect("(");
            Term t = term();
            expect(")");
            expect("<");
            if (peek().type != Tok::number || peek().text != "1") fail("expected '1/' in magnitude atom");
            ++i_;
            expect("/");
            Term v;
            if (peek().type == Tok::number) {
                if (peek().text == "0" || peek().text.find_first_not_of('0') == std::string::npos)
                    fail("magnitude bound must be positive");
                v = make_num(parse_rational(toks_[i_++].text));
            } else {
                v = make_var(identifier("bound variable or integer"));
            }
            return make_mag(t, v);
        }
        if (peek().type == Tok::ident && peek().text == "st") {
            ++i_;
            expect("(");
            Term t = term();
            expect(")");
            return make_atom(K::st, {t});
        }
        if (at("(")) {
            std::size_t save = i_;
            try {
                return atom();
            } catch (const SyntaxError&) {
                i_ = save;
            }
            expect("(");
            Formula f = implication();
            expect(")");
            return f;
        }
        return atom();
    }

    Formula atom() {
        std::size_t where = peek().pos;
        Term a = term();
        static const std::pair<const char*, K> cmps[] = {{"=", K::eq}, {"!=", K::neq}, {"<", K::lt},
                                                          {">", K::gt}, {"<=", K::le}, {">=", K::ge}};
        for (auto [sym, kind] : cmps)
            if (accept(sym)) return make_atom(kind, {a, term()});
        if (peek().type == Tok::ident && peek().text == "in") {
            ++i_;
            return make_atom(K::in, {a, term()});
        }
        if (a->kind == TK::var) return make_rel(a->name, {});
        if (a->kind == TK::app) return make_rel(a->name, a->args);
        throw SyntaxError("expected a comparison", where);
    }

    Term term() {
        Term a = product();
        for (;;) {
            if (accept("+")) a = make_term(TK::add, {a, product()});
            else if (accept("-")) a = make_term(TK::sub, {a, product()});
            else return a;
        }
    }

    Term product() {
        Term a = negation();
        for (;;) {
            if (accept("*")) a = make_term(TK::mul, {a, negation()});
            else if (accept("/")) a = make_term(TK::div, {a, negation()});
            else return a;
        }
    }

    Term negation() {
        if (accept("-")) return make_term(TK::neg, {negation()});
        return power();
    }

    Term power() {
        Term base = atom_term();
        if (accept("^")) {
            if (peek().type != Tok::number) fail("expected a non-negative integer exponent");
            long e = std::stol(toks_[i_++].text);
            return make_term(TK::pow, {base}, {}, e);
        }
        return base;
    }

    Term atom_term() {
        if (peek().type == Tok::number) return make_num(parse_rational(toks_[i_++].text));
        if (accept("(")) {
            Term t = term();
            expect(")");
            return t;
        }
        if (accept("{")) {
            std::vector<Term> elems;
            if (!at("}")) {
                elems.push_back(term());
                while (accept(",")) elems.push_back(term());
            }
            expect("}");
            return make_term(TK::set, std::move(elems));
        }
        std::string name = identifier("term");
        if (accept("(")) {
            std::vector<Term> args;
            if (!at(")")) {
                args.push_back(term());
                while (accept(",")) args.push_back(term());
            }
            expect(")");
            return make_term(TK::app, std::move(args), name);
        }
        return make_var(name);
    }
};

void term_vars(const Term& t, std::set<std::string>& out) {
    if (t->kind == TK::var) out.insert(t->name);
    for (const auto& a : t->args) term_vars(a, out);
}

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
    if (f->kind == K::quant) {
        if (f->bound && !bound.count(*f->bound)) out.insert(*f->bound);
        bool fresh = bound.insert(f->var).second;
        collect_free(f->kids[0], bound, out);
        if (fresh) bound.erase(f->var);
        return;
    }
    std::set<std::string> vs;
    for (const auto& t : f->terms) term_vars(t, vs);
    for (const auto& v : vs)
        if (!bound.count(v)) out.insert(v);
    for (const auto& k : f->kids) collect_free(k, bound, out);
}

void collect_binders(const Formula& f, std::vector<const Node*>& out) {
    if (f->kind == K::quant) out.push_back(f.get());
    for (const auto& k : f->kids) collect_binders(k, out);
}

// Sort of the binder for `name` visible at the mag atoms below `f`.
void check_mag_sorts(const Formula& f, std::map<std::string, Sort>& scope) {
    if (f->kind == K::quant) {
        auto prev = scope.find(f->var);
        std::optional<Sort> saved;
        if (prev != scope.end()) saved = prev->second;
        scope[f->var] = f->sort;
        check_mag_sorts(f->kids[0], scope);
        if (saved) scope[f->var] = *saved;
        else scope.erase(f->var);
        return;
    }
    if (f->kind == K::mag && f->terms[1]->kind == TK::var) {
        auto it = scope.find(f->terms[1]->name);
        if (it != scope.end() && it->second != Sort::posint)
            throw SyntaxError("magnitude bound '" + f->terms[1]->name + "' must be posint-sorted", 0);
    }
    for (const auto& k : f->kids) check_mag_sorts(k, scope);
}

}  // namespace

std::set<std::string> free_vars(const Formula& f) {
    std::set<std::string> bound, out;
    collect_free(f, bound, out);
    return out;
}

Formula parse(std::string_view text) {
    Formula f = Parser(text).run();
    std::set<std::string> free = free_vars(f);
    std::vector<const Node*> binders;
    collect_binders(f, binders);
    for (const Node* b : binders)
        if (free.count(b->var))
            throw SyntaxError("variable '" + b->var + "' occurs both free and bound", 0);
    std::map<std::string, Sort> scope;
    check_mag_sorts(f, scope);
    return f;
}

// ---- printer ----

namespace {

int term_prec(const Term& t) {
    switch (t->kind) {
        case TK::add:
        case TK::sub: return 1;
        case TK::mul:
        case TK::div: return 2;
        case TK::neg: return 3;
        case TK::pow: return 4;
        case TK::num: return is_integer(t->value) && t->value >= 0 ? 5 : 0;
        default: return 5;
    }
}

std::string term_str(const Term& t, int min_prec) {
    std::string s;
    auto sub = [](const Term& x, int p) { return term_str(x, p); };
    switch (t->kind) {
        case TK::var: s = t->name; break;
        case TK::num: s = hyperlab::to_string(t->value); break;
        case TK::app:
        case TK::set: {
            bool set = t->kind == TK::set;
            s = set ? "{" : t->name + "(";
            for (std::size_t i = 0; i < t->args.size(); ++i) s += (i ? "," : "") + sub(t->args[i], 0);
            s += set ? "}" : ")";
            break;
        }
        case TK::add: s = sub(t->args[0], 1) + "+" + sub(t->args[1], 2); break;
        case TK::sub: s = sub(t->args[0], 1) + "-" + sub(t->args[1], 2); break;
        case TK::mul: s = sub(t->args[0], 2) + "*" + sub(t->args[1], 3); break;
        case TK::div: s = sub(t->args[0], 2) + "/" + sub(t->args[1], 3); break;
        case TK::neg: s = "-" + sub(t->args[0], 3); break;
        case TK::pow: s = sub(t->args[0], 5) + "^" + std::to_string(t->exponent); break;
    }
    return term_prec(t) < min_prec ? "(" + s + ")" : s;
}

int prec(const Formula& f) {
    switch (f->kind) {
        case K::quant: return 0;
        case K::implies: return 1;
        case K::or_: return 2;
        case K::and_: return 3;
        case K::not_: return 4;
        default: return 5;
    }
}

std::string fstr(const Formula& f, bool tail_open);

// A quantifier swallows everything to its right, so it only goes bare when
// nothing follows it.
std::string operand(const Formula& f, int min_prec, bool tail_open) {
    if (f->kind == K::quant) return tail_open ? fstr(f, true) : "(" + fstr(f, true) + ")";
    if (prec(f) < min_prec) return "(" + fstr(f, true) + ")";
    return fstr(f, tail_open);
}

std::string fstr(const Formula& f, bool tail_open) {
    auto bin = [&](const char* op, int lp, int rp) {
        return operand(f->kids[0], lp, false) + " " + op + " " + operand(f->kids[1], rp, tail_open);
    };
    auto cmp = [&](const char* op) { return term_str(f->terms[0], 0) + " " + op + " " + term_str(f->terms[1], 0); };
    switch (f->kind) {
        case K::rel: {
            if (f->terms.empty()) return f->name;
            std::string s = f->name + "(";
            for (std::size_t i = 0; i < f->terms.size(); ++i) s += (i ? "," : "") + term_str(f->terms[i], 0);
            return s + ")";
        }
        case K::eq: return cmp("=");
        case K::neq: return cmp("!=");
        case K::in: return cmp("in");
        case K::lt: return cmp("<");
        case K::gt: return cmp(">");
        case K::le: return cmp("<=");
        case K::ge: return cmp(">=");
        case K::mag: return "mag(" + term_str(f->terms[0], 0) + ") < 1/" + term_str(f->terms[1], 5);
        case K::st: return "st(" + term_str(f->terms[0], 0) + ")";
        case K::not_: return "!" + operand(f->kids[0], 4, tail_open);
        case K::and_: return bin("&", 3, 4);
        case K::or_: return bin("|", 2, 3);
        case K::implies: return bin("->", 2, 1);
        case K::quant: {
            std::string head = std::string(keyword(f->q)) + " " + f->var;
            if (f->bound) head += "<=" + *f->bound;
            else if (f->sort != Sort::real) head += std::string(":") + to_string(f->sort);
            const Formula& body = f->kids[0];
            bool binary = body->kind == K::and_ || body->kind == K::or_ || body->kind == K::implies;
            return head + ". " + (binary ? "(" + fstr(body, true) + ")" : fstr(body, true));
        }
    }
    return "?";
}

}  // namespace

std::string print(const Term& t) { return term_str(t, 0); }
std::string print(const Formula& f) { return fstr(f, true); }

// ---- alpha equivalence ----

namespace {

using Scope = std::vector<std::pair<std::string, std::string>>;

// Index of the innermost binder for `v` on side `side`, or -1 when free.
long lookup(const Scope& s, const std::string& v, bool left) {
    for (long i = static_cast<long>(s.size()) - 1; i >= 0; --i)
        if ((left ? s[i].first : s[i].second) == v) return i;
    return -1;
}

bool var_eq(const std::string& a, const std::string& b, const Scope& s) {
    long i = lookup(s, a, true), j = lookup(s, b, false);
    return i == j && (i >= 0 || a == b);
}

bool term_eq(const Term& a, const Term& b, const Scope& s) {
    if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
    switch (a->kind) {
        case TK::var: return var_eq(a->name, b->name, s);
        case TK::num: return a->value == b->value;
        case TK::app:
            if (a->name != b->name) return false;
            break;
        case TK::pow:
            if (a->exponent != b->exponent) return false;
            break;
        default: break;
    }
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!term_eq(a->args[i], b->args[i], s)) return false;
    return true;
}

bool alpha(const Formula& a, const Formula& b, Scope& s) {
    if (a->kind != b->kind || a->terms.size() != b->terms.size() || a->kids.size() != b->kids.size()) return false;
    if (a->kind == K::rel && a->name != b->name) return false;
    for (std::size_t i = 0; i < a->terms.size(); ++i)
        if (!term_eq(a->terms[i], b->terms[i], s)) return false;
    if (a->kind == K::quant) {
        if (a->q != b->q || a->sort != b->sort || a->bound.has_value() != b->bound.has_value()) return false;
        if (a->bound && !var_eq(*a->bound, *b->bound, s)) return false;
        s.emplace_back(a->var, b->var);
        bool ok = alpha(a->kids[0], b->kids[0], s);
        s.pop_back();
        return ok;
    }
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!alpha(a->kids[i], b->kids[i], s)) return false;
    return true;
}

}  // namespace

bool alpha_equal(const Formula& a, const Formula& b) {
    Scope s;
    return alpha(a, b, s);
}

// ---- classification ----

bool is_internal(const Formula& f) {
    if (f->kind == K::st) return false;
    if (f->kind == K::quant && (is_st(f->q) || is_in(f->q))) return false;
    for (const auto& k : f->kids)
        if (!is_internal(k)) return false;
    return true;
}

namespace {

std::string first_external(const Formula& f) {
    if (f->kind == K::st) return "st predicate present";
    if (f->kind == K::quant && is_in(f->q)) return "in-quantifier present";
    if (f->kind == K::quant && is_st(f->q)) return "st-quantifier inside the matrix";
    for (const auto& k : f->kids) {
        std::string r = first_external(k);
        if (!r.empty()) return r;
    }
    return {};
}

}  // namespace

DeltaClass classify_delta_st(const Formula& f) {
    DeltaClass out;
    Formula cur = f;
    while (cur->kind == K::quant && is_st(cur->q)) {
        ++out.prefix;
        cur = cur->kids[0];
    }
    out.reason = first_external(cur);
    out.delta_st = out.reason.empty();
    if (!out.delta_st) out.prefix = 0;
    return out;
}

}  // namespace hyperlab::formula
