#include "hyperlab/error.hpp"
#include "hyperlab/formula.hpp"

#include <functional>

namespace hyperlab::formula {

using K = Node::Kind;
using TK = TermNode::Kind;

namespace {

Formula with_kid(const Formula& f, std::size_t i, Formula kid) {
    Node copy = *f;
    copy.kids[i] = std::move(kid);
    return std::make_shared<const Node>(std::move(copy));
}

Formula with_body(const Formula& q, Formula body) { return with_kid(q, 0, std::move(body)); }

bool term_mentions(const Term& t, const std::string& v) {
    if (t->kind == TK::var && t->name == v) return true;
    for (const auto& a : t->args)
        if (term_mentions(a, v)) return true;
    return false;
}

Term term_subst(const Term& t, const std::string& from, const std::string& to) {
    if (!term_mentions(t, from)) return t;
    if (t->kind == TK::var) return make_var(to);
    TermNode copy = *t;
    for (auto& a : copy.args) a = term_subst(a, from, to);
    return std::make_shared<const TermNode>(std::move(copy));
}

// Renames free occurrences of `from`; nullopt if `to` would be captured.
std::optional<Formula> subst(const Formula& f, const std::string& from, const std::string& to) {
    if (!free_vars(f).count(from)) return f;
    Node copy = *f;
    if (f->kind == K::quant) {
        if (f->bound && *f->bound == from) copy.bound = to;
        if (f->var != from) {
            if (f->var == to && free_vars(f->kids[0]).count(from)) return std::nullopt;
            auto body = subst(f->kids[0], from, to);
            if (!body) return std::nullopt;
            copy.kids[0] = *body;
        }
        return std::make_shared<const Node>(std::move(copy));
    }
    for (auto& t : copy.terms) t = term_subst(t, from, to);
    for (auto& k : copy.kids) {
        auto r = subst(k, from, to);
        if (!r) return std::nullopt;
        k = *r;
    }
    return std::make_shared<const Node>(std::move(copy));
}

struct Polarity {
    bool pos = false, neg = false, other = false;
    bool only_positive() const { return !neg && !other; }
    bool only_negative() const { return !pos && !other; }
};

// Where `v` appears as a magnitude denominator; any other use is "other".
void polarity(const Formula& f, const std::string& v, bool positive, Polarity& out) {
    switch (f->kind) {
        case K::quant:
            if (f->bound && *f->bound == v) out.other = true;
            if (f->var != v) polarity(f->kids[0], v, positive, out);
            return;
        case K::not_: polarity(f->kids[0], v, !positive, out); return;
        case K::implies:
            polarity(f->kids[0], v, !positive, out);
            polarity(f->kids[1], v, positive, out);
            return;
        case K::and_:
        case K::or_:
            for (const auto& k : f->kids) polarity(k, v, positive, out);
            return;
        case K::mag:
            if (term_mentions(f->terms[0], v)) out.other = true;
            if (f->terms[1]->kind == TK::var && f->terms[1]->name == v) (positive ? out.pos : out.neg) = true;
            return;
        default:
            for (const auto& t : f->terms)
                if (term_mentions(t, v)) out.other = true;
    }
}

Polarity polarity_of(const Formula& f, const std::string& v) {
    Polarity p;
    polarity(f, v, true, p);
    return p;
}

void names(const Formula& f, std::set<std::string>& out) {
    if (f->kind == K::quant) {
        out.insert(f->var);
        if (f->bound) out.insert(*f->bound);
    }
    std::function<void(const Term&)> tv = [&](const Term& t) {
        if (t->kind == TK::var) out.insert(t->name);
        for (const auto& a : t->args) tv(a);
    };
    for (const auto& t : f->terms) tv(t);
    for (const auto& k : f->kids) names(k, out);
}

std::string fresh(const std::string& base, std::set<std::string>& used) {
    std::string name = base;
    for (int i = 1; used.count(name); ++i) name = base + std::to_string(i);
    used.insert(name);
    return name;
}

using Site = std::function<std::optional<Formula>(const Formula&)>;

std::optional<Formula> first_site(const Formula& f, const Site& at) {
    if (auto r = at(f)) return r;
    for (std::size_t i = 0; i < f->kids.size(); ++i)
        if (auto r = first_site(f->kids[i], at)) return with_kid(f, i, *r);
    return std::nullopt;
}

bool is_plain(const Formula& f, QKind q) { return f->kind == K::quant && f->q == q && !f->bound; }

QKind dual(QKind q) {
    switch (q) {
        case QKind::all: return QKind::ex;
        case QKind::ex: return QKind::all;
        case QKind::all_st: return QKind::ex_st;
        case QKind::ex_st: return QKind::all_st;
        case QKind::all_in: return QKind::ex_in;
        case QKind::ex_in: return QKind::all_in;
    }
    return q;
}

// ---- rules at a single site ----

std::optional<Formula> merge_at(const Formula& f) {
    if (f->kind != K::quant || !is_st(f->q) || f->sort != Sort::posint) return std::nullopt;
    const Formula& inner = f->kids[0];
    if (inner->kind != K::quant || inner->q != f->q || inner->sort != Sort::posint || inner->var == f->var)
        return std::nullopt;
    const Formula& theta = inner->kids[0];
    Polarity a = polarity_of(theta, f->var), b = polarity_of(theta, inner->var);
    bool ok = f->q == QKind::all_st ? a.only_positive() && b.only_positive()
                                    : a.only_negative() && b.only_negative();
    if (!ok) return std::nullopt;
    auto merged = subst(theta, inner->var, f->var);
    if (!merged) return std::nullopt;
    return with_body(f, *merged);
}

std::optional<Formula> idealize_at(const Formula& f, std::set<std::string>& used) {
    if (f->kind != K::quant || f->bound || (f->q != QKind::ex && f->q != QKind::all)) return std::nullopt;
    QKind chain_kind = f->q;
    QKind want = chain_kind == QKind::ex ? QKind::all_st : QKind::ex_st;
    std::vector<Formula> chain;
    Formula cur = f;
    while (is_plain(cur, chain_kind)) {
        chain.push_back(cur);
        cur = cur->kids[0];
    }
    if (cur->kind != K::quant || cur->q != want || cur->sort != Sort::posint) return std::nullopt;
    const Formula& psi = cur->kids[0];
    if (!is_internal(psi)) return std::nullopt;
    std::string ell = fresh("l", used);
    auto renamed = subst(psi, cur->var, ell);
    if (!renamed) return std::nullopt;
    Formula body = make_quant(chain_kind == QKind::ex ? QKind::all : QKind::ex, ell, Sort::posint, *renamed, cur->var);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) body = with_body(*it, body);
    return with_body(cur, body);
}

std::optional<Formula> collapse_at(const Formula& f) {
    if (f->kind != K::quant || !f->bound) return std::nullopt;
    Polarity p = polarity_of(f->kids[0], f->var);
    bool ok = f->q == QKind::all ? p.only_positive() : f->q == QKind::ex && p.only_negative();
    if (!ok) return std::nullopt;
    return subst(f->kids[0], f->var, *f->bound);
}

bool st_quant(const Formula& f) { return f->kind == K::quant && is_st(f->q); }

std::optional<Formula> commute_at(const Formula& f) {
    if (f->kind != K::and_ && f->kind != K::or_ && f->kind != K::implies) return std::nullopt;
    const Formula& a = f->kids[0];
    const Formula& b = f->kids[1];
    Node copy = *f;
    if (st_quant(b) && !free_vars(a).count(b->var)) {
        copy.kids = {a, b->kids[0]};
        return with_body(b, std::make_shared<const Node>(std::move(copy)));
    }
    if (st_quant(a) && !free_vars(b).count(a->var)) {
        copy.kids = {a->kids[0], b};
        Formula moved = with_body(a, std::make_shared<const Node>(std::move(copy)));
        if (f->kind != K::implies) return moved;
        Node q = *moved;
        q.q = dual(a->q);
        return std::make_shared<const Node>(std::move(q));
    }
    return std::nullopt;
}

std::optional<Formula> exchange_at(const Formula& f) {
    if (f->kind != K::quant || f->bound) return std::nullopt;
    const Formula& inner = f->kids[0];
    bool ok = (f->q == QKind::all && inner->kind == K::quant && inner->q == QKind::all_st) ||
              (f->q == QKind::ex && inner->kind == K::quant && inner->q == QKind::ex_st);
    if (!ok || inner->var == f->var) return std::nullopt;
    return with_body(inner, with_body(f, inner->kids[0]));
}

// ---- expansion of in-quantifiers ----

struct Prefix {
    std::vector<Formula> quants;
    Formula matrix;
};

Prefix split_prefix(const Formula& f) {
    Prefix p;
    Formula cur = f;
    while (cur->kind == K::quant) {
        p.quants.push_back(cur);
        cur = cur->kids[0];
    }
    p.matrix = cur;
    return p;
}

enum class Shape { none, ae, ea, uniform_ex, uniform_all };

const char* shape_name(Shape s) {
    switch (s) {
        case Shape::ae: return "forall-block exists-block";
        case Shape::ea: return "exists-block forall-block";
        case Shape::uniform_ex: return "existential infinitesimals";
        case Shape::uniform_all: return "universal infinitesimals";
        case Shape::none: break;
    }
    return "unsupported";
}

// Index of the first quantifier that breaks an `first*` then `second*` pattern.
std::optional<std::size_t> block_break(const std::vector<Formula>& qs, bool first_universal) {
    bool in_second = false;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        bool u = is_universal(qs[i]->q);
        if (u != first_universal) in_second = true;
        else if (in_second) return i;
    }
    return std::nullopt;
}


Shape shape_of(const Prefix& p) {
    bool any_in = false, all_ex = true, all_all = true;
    for (const auto& q : p.quants) {
        if (is_st(q->q)) return Shape::none;
        if (is_in(q->q)) {
            any_in = true;
            (q->q == QKind::ex_in ? all_all : all_ex) = false;
        }
    }
    if (!any_in || !is_internal(p.matrix)) return Shape::none;
    if (!block_break(p.quants, true)) return Shape::ae;
    if (!block_break(p.quants, false)) return Shape::ea;
    if (all_ex) return Shape::uniform_ex;
    if (all_all) return Shape::uniform_all;
    return Shape::none;
}

Formula plain(const Formula& q, Formula body) {
    Node copy = *q;
    if (q->q == QKind::all_in) copy.q = QKind::all;
    if (q->q == QKind::ex_in) copy.q = QKind::ex;
    copy.kids = {std::move(body)};
    return std::make_shared<const Node>(std::move(copy));
}

Formula wrap(const std::vector<Formula>& qs, Formula body) {
    for (auto it = qs.rbegin(); it != qs.rend(); ++it) body = plain(*it, body);
    return body;
}

// Conjunction of |x_i| < 1/v_i for the in-variables among qs, with the
// st-variables named from `base`.
struct MagBlock {
    std::vector<std::string> st_vars;
    Formula conj;
};

MagBlock mags(const std::vector<Formula>& qs, const std::string& base, std::set<std::string>& used) {
    MagBlock b;
    for (const auto& q : qs) {
        if (!is_in(q->q)) continue;
        std::string v = fresh(base, used);
        b.st_vars.push_back(v);
        Formula m = make_mag(make_var(q->var), make_var(v));
        b.conj = b.conj ? make_and(b.conj, m) : m;
    }
    return b;
}

Formula st_chain(QKind q, const std::vector<std::string>& vars, Formula body) {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) body = make_quant(q, *it, Sort::posint, body);
    return body;
}

std::optional<Formula> expand(const Formula& f, std::set<std::string>& used, Shape* shape_out = nullptr) {
    Prefix p = split_prefix(f);
    Shape shape = shape_of(p);
    if (shape_out) *shape_out = shape;
    if (shape == Shape::none) return std::nullopt;
    const Formula& phi = p.matrix;

    if (shape == Shape::uniform_ex || shape == Shape::uniform_all) {
        MagBlock b = mags(p.quants, "m", used);
        Formula core = shape == Shape::uniform_ex ? st_chain(QKind::all_st, b.st_vars, make_and(b.conj, phi))
                                                  : st_chain(QKind::ex_st, b.st_vars, make_implies(b.conj, phi));
        return wrap(p.quants, core);
    }

    bool first_universal = shape == Shape::ae;
    std::size_t split = 0;
    while (split < p.quants.size() && is_universal(p.quants[split]->q) == first_universal) ++split;
    std::vector<Formula> outer(p.quants.begin(), p.quants.begin() + split);
    std::vector<Formula> inner(p.quants.begin() + split, p.quants.end());
    MagBlock ob = mags(outer, "n", used);
    MagBlock ib = mags(inner, "m", used);

    Formula cons = phi;
    if (ib.conj)
        cons = first_universal ? st_chain(QKind::all_st, ib.st_vars, make_and(ib.conj, phi))
                               : st_chain(QKind::ex_st, ib.st_vars, make_implies(ib.conj, phi));
    Formula core = wrap(inner, cons);
    if (ob.conj) {
        Formula ante = st_chain(QKind::all_st, ob.st_vars, ob.conj);
        core = first_universal ? make_implies(ante, core) : make_and(ante, core);
    }
    return wrap(outer, core);
}

std::string describe(const Formula& q, std::size_t i) {
    return std::string(keyword(q->q)) + " " + q->var + " at prefix position " + std::to_string(i);
}

[[noreturn]] void unsupported(const Formula& f) {
    Prefix p = split_prefix(f);
    for (std::size_t i = 0; i < p.quants.size(); ++i)
        if (is_st(p.quants[i]->q))
            throw DomainError("unsupported-shape", "st-quantifier mixed with infinitesimal ones: " +
                                                       describe(p.quants[i], i));
    if (!is_internal(p.matrix)) {
        std::function<const Node*(const Formula&)> find = [&](const Formula& g) -> const Node* {
            if (g->kind == K::quant && (is_st(g->q) || is_in(g->q))) return g.get();
            if (g->kind == K::st) return g.get();
            for (const auto& k : g->kids)
                if (auto r = find(k)) return r;
            return nullptr;
        };
        const Node* bad = find(p.matrix);
        std::string what = bad->kind == K::st ? std::string("st predicate")
                                              : std::string(keyword(bad->q)) + " " + bad->var;
        throw DomainError("unsupported-shape", "matrix after the prefix is not an internal formula: " + what);
    }
    bool first_universal = !p.quants.empty() && is_universal(p.quants[0]->q);
    std::size_t i = block_break(p.quants, first_universal).value_or(0);
    throw DomainError("unsupported-shape",
                      "mixed infinitesimal quantifiers beyond two blocks: " + describe(p.quants[i], i));
}

std::set<std::string> all_names(const Formula& f) {
    std::set<std::string> used;
    names(f, used);
    return used;
}

}  // namespace

std::optional<Formula> apply_rule(const std::string& rule, const Formula& f) {
    std::set<std::string> used = all_names(f);
    if (rule == "expand-infinitesimal-def") return expand(f, used);
    if (rule == "countable-idealization")
        return first_site(f, [&](const Formula& g) { return idealize_at(g, used); });
    if (rule == "bounded-quantifier-collapse") return first_site(f, collapse_at);
    if (rule == "st-quantifier-commute") return first_site(f, commute_at);
    if (rule == "st-quantifier-merge") return first_site(f, merge_at);
    if (rule == "prefix-exchange") return first_site(f, exchange_at);
    if (rule == "transfer-collapse") {
        DeltaClass c = classify_delta_st(f);
        if (!c.delta_st || c.prefix == 0) return std::nullopt;
        return transfer_collapse(f);
    }
    throw DomainError("unknown-rule", rule);
}

RewriteResult rewrite_to_delta_st(const Formula& f) {
    RewriteResult out;
    out.output = f;
    if (classify_delta_st(f).delta_st) {
        out.shape = "already delta_st";
        return out;
    }
    std::set<std::string> used = all_names(f);
    Shape shape = Shape::none;
    auto expanded = expand(f, used, &shape);
    if (!expanded) unsupported(f);
    out.shape = shape_name(shape);
    out.trace.push_back({"expand-infinitesimal-def", f, *expanded});
    Formula cur = *expanded;

    auto step = [&](const char* rule) {
        auto next = apply_rule(rule, cur);
        if (!next) return false;
        out.trace.push_back({rule, cur, *next});
        cur = *next;
        return true;
    };
    // Merging first keeps the st-prefix short; idealization must be followed
    // by the collapse of the bounded quantifier it introduces.
    for (int guard = 0; !classify_delta_st(cur).delta_st; ++guard) {
        if (guard > 1000) throw DomainError("rewrite-stuck", "no termination: " + print(cur));
        if (step("st-quantifier-merge")) continue;
        if (step("countable-idealization")) {
            if (!step("bounded-quantifier-collapse"))
                throw DomainError("rewrite-stuck", "bounded quantifier does not collapse: " + print(cur));
            continue;
        }
        if (step("st-quantifier-commute") || step("prefix-exchange")) continue;
        throw DomainError("rewrite-stuck", "no rule applies to " + print(cur));
    }
    out.output = cur;
    return out;
}

bool replay(const RewriteTrace& trace) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (i > 0 && print(trace[i - 1].after) != print(trace[i].before)) return false;
        auto r = apply_rule(trace[i].rule, trace[i].before);
        if (!r || print(*r) != print(trace[i].after)) return false;
    }
    return true;
}

Formula transfer_collapse(const Formula& f) {
    DeltaClass c = classify_delta_st(f);
    if (!c.delta_st) throw DomainError("not-delta-st", c.reason);
    if (f->kind != K::quant || !is_st(f->q)) return f;
    Node copy = *f;
    copy.q = f->q == QKind::all_st ? QKind::all : QKind::ex;
    copy.kids = {transfer_collapse(f->kids[0])};
    return std::make_shared<const Node>(std::move(copy));
}

}  // namespace hyperlab::formula
