// hyperlab: command-line front end over the library modules.
#include "hyperlab/calculus.hpp"
#include "hyperlab/error.hpp"
#include "hyperlab/forcing.hpp"
#include "hyperlab/formula.hpp"
#include "hyperlab/thick.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using json = nlohmann::ordered_json;
using namespace hyperlab;

namespace {

struct Out {
    bool structured = false;
    json record = json::object();
    std::ostringstream text;

    void flush() {
        if (structured) std::cout << record.dump(2) << "\n";
        else std::cout << text.str();
    }
};

// Inline text, or the contents of a file when the argument names one.
std::string read_input(const std::string& arg) {
    std::error_code ec;
    if (arg.size() < 4096 && std::filesystem::is_regular_file(arg, ec)) {
        std::ifstream in(arg);
        std::stringstream ss;
        ss << in.rdbuf();
        std::string s = ss.str();
        while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
        return s;
    }
    return arg;
}

// ';' separates condition lines on one command line.
forcing::Condition read_condition(const std::string& arg) {
    std::string s = read_input(arg);
    std::replace(s.begin(), s.end(), ';', '\n');
    return forcing::parse_condition(s);
}

TagScheme parse_scheme(const std::string& s) {
    if (s == "left") return TagScheme::left;
    if (s == "right") return TagScheme::right;
    if (s == "midpoint") return TagScheme::midpoint;
    throw SyntaxError("tag scheme must be left, right or midpoint", 0);
}

json trace_json(const formula::RewriteTrace& trace) {
    json steps = json::array();
    for (const auto& s : trace)
        steps.push_back({{"rule", s.rule}, {"before", formula::print(s.before)}, {"after", formula::print(s.after)}});
    return steps;
}

std::string bits_string(const std::vector<int>& bits) {
    std::string s;
    for (int b : bits) s += b ? '1' : '0';
    return s;
}

json nu_json(const std::vector<thick::NuResult>& rs) {
    json rows = json::array();
    for (const auto& r : rs) {
        json row = {{"m", r.m}};
        if (r.nu) row["nu"] = *r.nu;
        else row["thin_witness"] = *r.thin_witness;
        rows.push_back(row);
    }
    return rows;
}

void nu_text(std::ostream& os, const std::vector<thick::NuResult>& rs) {
    os << "m\tnu\n";
    for (const auto& r : rs) {
        os << r.m << "\t";
        if (r.nu) os << *r.nu << "\n";
        else {
            os << "thin, witness {";
            for (std::size_t j = 0; j < r.thin_witness->size(); ++j) os << (j ? "," : "") << (*r.thin_witness)[j];
            os << "}\n";
        }
    }
}

Expr rename_var(const Expr& e, const std::string& from, const std::string& to) {
    using Op = Expr::Op;
    switch (e.op()) {
        case Op::constant: return e;
        case Op::variable: return e.name() == from ? Expr::variable(to) : e;
        case Op::neg: return Expr::neg(rename_var(e.arg(0), from, to));
        case Op::pow: return Expr::power(rename_var(e.arg(0), from, to), e.exponent());
        case Op::exp:
        case Op::sin:
        case Op::cos: return Expr::call(e.op(), rename_var(e.arg(0), from, to));
        default: return Expr::binary(e.op(), rename_var(e.arg(0), from, to), rename_var(e.arg(1), from, to));
    }
}

// Rules for `generic`: fix:<set>, diag, decide:<m>:<B>, restrict:<index set>.
forcing::DenseRule parse_rule(const std::string& text) {
    using namespace forcing;
    auto colon = text.find(':');
    std::string head = text.substr(0, colon), rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "fix") {
        HFSet z = parse_hfset(rest);
        return {text, [z](const Condition& c) { return fix_constant(c, z).cond; }};
    }
    if (head == "diag") return {text, [](const Condition& c) { return diag_name(c).cond; }};
    if (head == "decide") {
        auto c2 = rest.find(':');
        if (c2 == std::string::npos) throw SyntaxError("decide rule is decide:<m>:<B>", colon);
        int m = std::stoi(rest.substr(0, c2));
        long B = std::stol(rest.substr(c2 + 1));
        return {text, [m, B](const Condition& c) { return decide_membership(c, m, B); }};
    }
    if (head == "restrict") {
        IndexSet s = parse_index_set(rest);
        return {text, [s](const Condition& c) { return Condition(intersect(c.p, s), c.q); }};
    }
    throw SyntaxError("unknown rule '" + head + "'", 0);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperlab: infinitesimal calculus, formula rewriting and forcing experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "text";
    app.add_option("--format", format, "text or structured (JSON)")->check(CLI::IsMember({"text", "structured"}));
    long trunc = kDefaultTrunc;
    app.add_option("--trunc", trunc, "truncation order for series operations");
    int urank = forcing::kUniverseRank;
    app.add_option("--universe-rank", urank, "rank of the finite set universe (0..4)");

    Out out;
    std::function<void()> run;
    std::string expr_text, formula_text, cond_text, at_text, a_text, b_text, h_text, xmax_text, scheme = "left",
                                                                                           mode = "symbolic";
    std::vector<std::string> h_list;

    auto* hyper = app.add_subcommand("hyper", "evaluate an expression in eps over the field");
    hyper->add_option("expr", expr_text)->required();
    hyper->callback([&] {
        run = [&] {
            EvalOptions opt;
            opt.order = trunc;
            LCNum v = eval_expr(parse_expr(expr_text), {{"eps", LCNum::epsilon()}}, opt);
            Magnitude mag = classify(v);
            out.record = {{"value", to_string(v)}, {"class", to_string(mag)}};
            out.text << "value: " << to_string(v) << "\nclass: " << to_string(mag) << "\n";
            if (mag != Magnitude::unlimited) {
                out.record["shadow"] = to_string(shadow(v));
                out.text << "shadow: " << to_string(shadow(v)) << "\n";
            }
        };
    });

    std::string var = "x";
    auto* deriv = app.add_subcommand("deriv", "derivative at a rational point via infinitesimal increments");
    deriv->add_option("expr", expr_text)->required();
    deriv->add_option("--at", at_text)->required();
    deriv->add_option("--var", var);
    deriv->callback([&] {
        run = [&] {
            Expr f = parse_expr(expr_text);
            if (var != "x") {
                if (f.free_vars().count("x")) throw DomainError("ambiguous-variable", "x appears besides --var " + var);
                f = rename_var(f, var, "x");  // the library differentiates in x
            }
            EvalOptions opt;
            opt.order = trunc;
            Rational d = derivative_at(f, parse_rational(at_text), default_h_choices(), opt);
            out.record = {{"expr", to_string(f)}, {"at", at_text}, {"derivative", to_string(d)}};
            out.text << to_string(d) << "\n";
        };
    });

    auto* integ = app.add_subcommand("integrate", "hyperfinite Riemann integral");
    integ->add_option("expr", expr_text)->required();
    integ->add_option("--a", a_text)->required();
    integ->add_option("--b", b_text)->required();
    integ->add_option("--mode", mode)->check(CLI::IsMember({"symbolic", "numeric"}));
    integ->add_option("--tags", scheme);
    integ->callback([&] {
        run = [&] {
            Expr f = parse_expr(expr_text);
            Rational a = parse_rational(a_text), b = parse_rational(b_text);
            if (mode == "symbolic") {
                auto r = riemann_integral_symbolic(f, a, b, parse_scheme(scheme));
                json samples = json::array();
                for (const auto& s : r.samples) samples.push_back(to_string(s));
                out.record = {{"mode", mode}, {"value", to_string(r.value)}, {"closed_form", to_string(r.closed_form)},
                              {"samples", samples}};
                out.text << "value: " << to_string(r.value) << "\nclosed form: " << to_string(r.closed_form) << "\n";
            } else {
                auto r = riemann_integral_numeric(f, a, b);
                out.record = {{"mode", mode}, {"value", to_string(r.value)}, {"levels", r.levels},
                              {"final_increment", to_string(r.final_increment)}};
                if (r.observed_order) out.record["observed_order"] = *r.observed_order;
                out.text << "value: " << to_string(r.value) << " (" << to_double(r.value) << ")\nlevels: " << r.levels
                         << "\n";
            }
        };
    });

    auto* tagged = app.add_subcommand("tagged", "check that a tagging scheme has the same shadow");
    tagged->add_option("expr", expr_text)->required();
    tagged->add_option("--a", a_text)->required();
    tagged->add_option("--b", b_text)->required();
    tagged->add_option("--scheme", scheme);
    tagged->callback([&] {
        run = [&] {
            bool ok = tagged_sum_check(parse_expr(expr_text), parse_rational(a_text), parse_rational(b_text),
                                       parse_scheme(scheme));
            out.record = {{"scheme", scheme}, {"passes", ok}};
            out.text << (ok ? "pass" : "fail") << "\n";
        };
    });

    int levels = 0;
    auto* peano = app.add_subcommand("peano", "Euler polygon for y' = f(x, y), y(0) = 0");
    peano->add_option("expr", expr_text)->required();
    peano->add_option("--step", h_text, "initial step h")->required();
    peano->add_option("--x-max", xmax_text)->required();
    peano->add_option("--levels", levels, "halvings to study; 0 prints the polygon");
    peano->callback([&] {
        run = [&] {
            Expr f = parse_expr(expr_text);
            Rational h = parse_rational(h_text), xm = parse_rational(xmax_text);
            if (levels <= 0) {
                json pts = json::array();
                for (const auto& v : peano_euler(f, h, xm)) {
                    pts.push_back({to_string(v.x), to_string(v.y)});
                    out.text << to_string(v.x) << "\t" << to_string(v.y) << "\n";
                }
                out.record = {{"polyline", pts}};
                return;
            }
            json rows = json::array();
            out.text << "x\textrapolated\n";
            for (const auto& p : peano_study(f, h, xm, levels)) {
                json vals = json::array();
                for (const auto& y : p.values) vals.push_back(to_string(y));
                rows.push_back({{"x", to_string(p.x)}, {"values", vals}, {"extrapolated", to_string(p.extrapolated)}});
                out.text << to_string(p.x) << "\t" << to_string(p.extrapolated) << "\n";
            }
            out.record = {{"points", rows}};
        };
    });

    int geometric = 0;
    std::string eps_text = "1/1000000000";
    auto* measure = app.add_subcommand("measure", "outer and inner measure of a finite interval union");
    measure->add_option("set", expr_text, "e.g. [0,1] + [2,5/2]");
    measure->add_option("--geometric", geometric, "run the subadditivity check on n geometric pieces instead");
    measure->add_option("--eps", eps_text);
    measure->callback([&] {
        run = [&] {
            if (geometric > 0) {
                auto [fam, tail] = geometric_family(geometric);
                auto r = sigma_subadd_check(fam, tail, parse_rational(eps_text));
                out.record = {{"lhs", to_string(r.lhs)}, {"rhs", to_string(r.rhs)}, {"passes", r.passes}};
                out.text << "lhs: " << to_string(r.lhs) << "\nrhs: " << to_string(r.rhs) << "\n"
                         << (r.passes ? "pass" : "fail") << "\n";
                return;
            }
            if (expr_text.empty()) throw SyntaxError("measure needs a set or --geometric", 0);
            auto r = lebesgue_measures(parse_interval_union(expr_text));
            out.record = {{"outer", to_string(r.outer)}, {"inner", to_string(r.inner)}};
            out.text << "outer: " << to_string(r.outer) << "\ninner: " << to_string(r.inner) << "\n";
        };
    });

    auto* rewrite = app.add_subcommand("rewrite", "rewrite an st-formula into delta-st normal form");
    rewrite->add_option("formula", formula_text)->required();
    rewrite->callback([&] {
        run = [&] {
            auto r = formula::rewrite_to_delta_st(formula::parse(read_input(formula_text)));
            out.record = {{"output", formula::print(r.output)}, {"shape", r.shape}, {"trace", trace_json(r.trace)}};
            out.text << formula::print(r.output) << "\n";
            for (const auto& s : r.trace) out.text << "  " << s.rule << ": " << formula::print(s.after) << "\n";
        };
    });

    auto* classify_cmd = app.add_subcommand("classify", "is the formula delta-st?");
    classify_cmd->add_option("formula", formula_text)->required();
    classify_cmd->callback([&] {
        run = [&] {
            auto c = formula::classify_delta_st(formula::parse(read_input(formula_text)));
            out.record = {{"delta_st", c.delta_st}};
            if (c.delta_st) out.record["prefix"] = c.prefix;
            else out.record["reason"] = c.reason;
            if (c.delta_st) out.text << "delta_st (prefix " << c.prefix << ")\n";
            else out.text << "not delta_st: " << c.reason << "\n";
        };
    });

    bool rewrite_first = false;
    auto* collapse = app.add_subcommand("collapse", "erase st marks from a delta-st formula");
    collapse->add_option("formula", formula_text)->required();
    collapse->add_flag("--rewrite", rewrite_first, "rewrite to delta-st first");
    collapse->callback([&] {
        run = [&] {
            auto f = formula::parse(read_input(formula_text));
            json trace = json::array();
            if (rewrite_first) {
                auto r = formula::rewrite_to_delta_st(f);
                trace = trace_json(r.trace);
                f = r.output;
            }
            auto g = formula::transfer_collapse(f);
            out.record = {{"output", formula::print(g)}, {"trace", trace}};
            out.text << formula::print(g) << "\n";
        };
    });

    std::string force_mode = "los";
    forcing::SpaceCaps caps;
    auto* force = app.add_subcommand("force", "does a condition force a formula?");
    force->add_option("condition", cond_text, "condition text (';' separates lines) or file")->required();
    force->add_option("formula", formula_text)->required();
    force->add_option("--mode", force_mode)->check(CLI::IsMember({"los", "clausal"}));
    force->add_option("--caps-prelude", caps.prelude);
    force->add_option("--caps-period", caps.period);
    force->add_option("--caps-rank", caps.rank);
    force->callback([&] {
        run = [&] {
            auto c = read_condition(cond_text);
            auto f = formula::parse(read_input(formula_text));
            out.record = {{"condition", forcing::to_string(c)}, {"formula", formula::print(f)}, {"mode", force_mode}};
            if (force_mode == "los") {
                auto t = forcing::forces_los(c, f, urank);
                out.record["forces"] = forcing::to_string(t);
                out.text << forcing::to_string(t) << "\n";
            } else {
                auto space = forcing::enumerate_space(caps, urank);
                auto v = forcing::forces_clausal(c, f, space);
                out.record["verdict"] = forcing::to_string(v);
                out.record["space_size"] = space.size();
                out.text << forcing::to_string(v) << "\n";
            }
        };
    });

    int name_m = 0;
    long bound_B = 16;
    auto* decide = app.add_subcommand("decide", "decide n in G_m for every n <= B");
    decide->add_option("condition", cond_text)->required();
    decide->add_option("--m", name_m);
    decide->add_option("--bound", bound_B);
    decide->callback([&] {
        run = [&] {
            auto c = read_condition(cond_text);
            auto d = forcing::decide_membership(c, name_m, bound_B);
            auto bits = forcing::standard_part_name(d, name_m, bound_B);
            auto ext = forcing::extends(d, c);
            out.record = {{"p", forcing::to_string(d.p)},     {"q", forcing::to_string(d.q)},
                          {"extends_input", forcing::to_string(ext)}, {"standard_part", bits_string(bits)}};
            out.text << "p: " << forcing::to_string(d.p) << "\nq: " << forcing::to_string(d.q)
                     << "\nextends input: " << forcing::to_string(ext) << "\nstandard part: " << bits_string(bits) << "\n";
        };
    });

    std::string family;
    std::vector<std::string> chain;
    long m_max = 8;
    auto* thick_cmd = app.add_subcommand("thick", "thickness bounds nu(m) of a family of finite sets");
    thick_cmd->add_option("--family", family);
    thick_cmd->add_option("--chain", chain, "descending families for the diagonal union");
    thick_cmd->add_option("--m-max", m_max);
    thick_cmd->callback([&] {
        run = [&] {
            if (!chain.empty()) {
                std::vector<thick::FinFamily> fams;
                for (const auto& s : chain) fams.push_back(thick::parse_family(s));
                auto rep = thick::diagonal_thick(fams, m_max);
                json bounds = json::array();
                for (const auto& b : rep.bounds) bounds.push_back({{"n", b.n}, {"k", b.k}, {"observed", b.observed}});
                out.record = {{"composite", rep.composite.to_string()}, {"guards", rep.guards},
                              {"thick", rep.thick},                     {"check", nu_json(rep.check)},
                              {"bounds", bounds}};
                out.text << "composite: " << rep.composite.to_string() << "\nthick up to " << m_max << ": "
                         << (rep.thick ? "yes" : "no") << "\n";
                nu_text(out.text, rep.check);
                for (const auto& b : rep.bounds)
                    out.text << "n=" << b.n << " bound k=" << b.k << " largest observed=" << b.observed << "\n";
                return;
            }
            if (family.empty()) throw SyntaxError("thick needs --family or --chain", 0);
            auto fam = thick::parse_family(family);
            auto rs = thick::thickness_nu(fam, m_max);
            out.record = {{"family", fam.to_string()}, {"nu", nu_json(rs)}};
            nu_text(out.text, rs);
        };
    });

    std::vector<std::string> rules;
    auto* generic = app.add_subcommand("generic", "descending chain through dense rules");
    generic->add_option("condition", cond_text)->required();
    generic->add_option("--rule", rules, "fix:<set>, diag, decide:<m>:<B>, restrict:<index set>");
    generic->callback([&] {
        run = [&] {
            std::vector<forcing::DenseRule> rs;
            for (const auto& r : rules) rs.push_back(parse_rule(r));
            auto chain_out = forcing::pseudo_generic(read_condition(cond_text), rs);
            json links = json::array();
            for (std::size_t i = 0; i < chain_out.size(); ++i) {
                std::string rule = i ? rules[i - 1] : "start";
                links.push_back({{"rule", rule}, {"p", forcing::to_string(chain_out[i].p)}, {"q", forcing::to_string(chain_out[i].q)}});
                out.text << i << " [" << rule << "]\n" << forcing::to_string(chain_out[i]) << "\n";
            }
            out.record = {{"chain", links}};
        };
    });

    std::string fiber_text, p_text = "all";
    int stages = 24;
    auto* split = app.add_subcommand("split", "split a rank-1 growing fiber into two disjoint halves");
    split->add_option("fiber", fiber_text, "e.g. rank=1 period=[{(vN(i))}]")->required();
    split->add_option("--p", p_text);
    split->add_option("--stages", stages);
    split->callback([&] {
        run = [&] {
            auto c = forcing::parse_condition("p: all\nq: " + read_input(fiber_text));
            auto r = forcing::split_fibers(c.q, forcing::parse_index_set(p_text), stages);
            json s = json::array();
            for (const auto& [i, xs] : r.s) {
                std::vector<std::string> names;
                for (const auto& x : xs) names.push_back(to_string(x));
                s.push_back({{"index", i}, {"subset", names}});
            }
            out.record = {{"p1", forcing::to_string(r.p1)}, {"p2", forcing::to_string(r.p2)}, {"n", r.n},
                          {"alpha", r.alpha}, {"s", s}, {"disjoint", r.disjoint}};
            out.text << "p1: " << forcing::to_string(r.p1) << "\np2: " << forcing::to_string(r.p2)
                     << "\ndisjoint: " << (r.disjoint ? "yes" : "no") << "\n";
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    out.structured = format == "structured";
    try {
        run();
        out.flush();
        return 0;
    } catch (const SyntaxError& e) {
        std::cerr << e.what() << "\n";
        if (out.structured) std::cout << json{{"error", "syntax-error"}, {"detail", e.what()}}.dump(2) << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << e.what() << "\n";
        if (out.structured) std::cout << json{{"error", e.name()}, {"detail", e.what()}}.dump(2) << "\n";
        return 1;
    }
}
