#pragma once

#include "hyperlab/lcnum.hpp"
#include "hyperlab/rational.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hyperlab::formula {

enum class QKind { all, ex, all_st, ex_st, all_in, ex_in };
enum class Sort { posint, real, set };

const char* keyword(QKind k);  // A, E, Ast, Est, Ain, Ein
const char* to_string(Sort s);
bool is_universal(QKind k);
bool is_st(QKind k);
bool is_in(QKind k);

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TermNode {
    enum class Kind { var, num, app, add, sub, mul, div, neg, pow, set };
    Kind kind;
    std::string name;        // var, app
    Rational value;          // num
    long exponent = 0;       // pow
    std::vector<Term> args;  // app arguments, operands or set elements
};

Term make_var(std::string name);
Term make_num(const Rational& v);

struct Node;
using Formula = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { rel, eq, neq, in, lt, gt, le, ge, mag, st, not_, and_, or_, implies, quant };
    Kind kind;
    std::string name;                  // rel: relation symbol
    std::vector<Term> terms;           // atoms; mag holds {t, v} for mag(t) < 1/v
    std::vector<Formula> kids;         // connectives and the quantifier body
    QKind q = QKind::all;
    std::string var;                   // bound variable
    Sort sort = Sort::real;
    std::optional<std::string> bound;  // "A l<=m." style bounded quantifier (posint)
};

Formula make_rel(std::string name, std::vector<Term> args);
Formula make_mag(Term t, Term v);
Formula make_not(Formula a);
Formula make_and(Formula a, Formula b);
Formula make_or(Formula a, Formula b);
Formula make_implies(Formula a, Formula b);
Formula make_quant(QKind q, std::string var, Sort sort, Formula body, std::optional<std::string> bound = std::nullopt);

Formula parse(std::string_view text);
std::string print(const Formula& f);
std::string print(const Term& t);

std::set<std::string> free_vars(const Formula& f);
bool alpha_equal(const Formula& a, const Formula& b);
// No st/in quantifiers and no st predicate anywhere.
bool is_internal(const Formula& f);

struct DeltaClass {
    bool delta_st = false;
    int prefix = 0;      // number of leading st-quantifiers when delta_st
    std::string reason;  // why not, otherwise
};
DeltaClass classify_delta_st(const Formula& f);

// ---- rewriting ----

inline const std::vector<std::string>& rule_names() {
    static const std::vector<std::string> names = {
        "expand-infinitesimal-def", "countable-idealization", "bounded-quantifier-collapse",
        "st-quantifier-commute",    "st-quantifier-merge",    "prefix-exchange",
        "transfer-collapse"};
    return names;
}

struct TraceStep {
    std::string rule;
    Formula before, after;
};
using RewriteTrace = std::vector<TraceStep>;

struct RewriteResult {
    Formula output;
    RewriteTrace trace;
    std::string shape;  // which supported prefix shape matched
};

// Each rule rewrites its first applicable site in pre-order; nullopt when
// nothing matches. Deterministic, so traces replay exactly.
std::optional<Formula> apply_rule(const std::string& rule, const Formula& f);

RewriteResult rewrite_to_delta_st(const Formula& f);
bool replay(const RewriteTrace& trace);

// Erases st marks from a delta_st formula (standard parameters asserted by caller).
Formula transfer_collapse(const Formula& f);

// ---- finite-grid semantics ----

struct Grids {
    std::vector<Rational> standard;
    std::vector<LCNum> infinitesimal;  // 0 is added for in-quantifiers
    std::vector<LCNum> plain;
};

struct Interpretation {
    std::map<std::string, std::function<bool(const std::vector<LCNum>&)>> relations;
    std::map<std::string, std::function<LCNum(const std::vector<LCNum>&)>> functions;
};

using Assignment = std::map<std::string, LCNum>;

// Finite evaluation; sound for refuting an equivalence only.
bool sample_semantics(const Formula& f, const Grids& grids, const Interpretation& interp,
                      const Assignment& env = {});

}  // namespace hyperlab::formula
