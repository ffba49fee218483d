#pragma once

#include "hyperlab/formula.hpp"

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testsupport {

using namespace hyperlab;

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

inline std::vector<std::string> corpus() { return read_lines(std::string(HYPERLAB_TEST_DATA) + "/corpus.txt"); }

// Grid families on which an in-quantifier and its st-expansion must agree:
// the plain grid holds the infinitesimal points, 0, and standard points of
// size >= 1, so |t| < 1/n for standard n picks out exactly the infinitesimal part.
inline std::vector<formula::Grids> grid_configurations(std::size_t max_size) {
    const LCNum e = LCNum::epsilon();
    auto R = [](long n, long d = 1) { return LCNum::from_rational(Rational(n, d)); };
    const std::vector<LCNum> small{e, -e, e * e, R(2) * e};
    const std::vector<LCNum> large{R(1), R(-2), R(3, 2)};
    const std::vector<std::vector<Rational>> standard{{1}, {1, 2}, {1, 2, 3}};

    std::vector<formula::Grids> out;
    for (unsigned sm = 0; sm < (1u << small.size()); ++sm)
        for (unsigned lm = 0; lm < (1u << large.size()); ++lm)
            for (const auto& st : standard) {
                formula::Grids g;
                g.standard = st;
                for (std::size_t i = 0; i < small.size(); ++i)
                    if (sm >> i & 1) g.infinitesimal.push_back(small[i]);
                g.plain = g.infinitesimal;
                g.plain.push_back(LCNum{});
                for (std::size_t i = 0; i < large.size(); ++i)
                    if (lm >> i & 1) g.plain.push_back(large[i]);
                if (g.plain.size() > max_size || g.infinitesimal.size() + 1 > max_size) continue;
                out.push_back(std::move(g));
            }
    return out;
}

inline std::vector<formula::Interpretation> interpretations() {
    using Args = std::vector<LCNum>;
    auto sum = [](const Args& a) {
        LCNum s;
        for (const auto& x : a) s = s + x;
        return s;
    };
    std::vector<formula::Interpretation> out(3);
    // "y = x^2"-style graph predicates
    out[0].relations["P"] = [](const Args& a) { return a.size() == 1 ? sign(a[0]) == 0 : a[1] == a[0] * a[0]; };
    out[0].relations["Q"] = [](const Args& a) { return sign(a[0]) >= 0; };
    out[0].relations["R"] = [](const Args& a) { return a[2] == a[0] + a[1]; };
    // order predicates
    out[1].relations["P"] = [](const Args& a) { return a.size() == 1 ? sign(a[0]) >= 0 : compare(a[0], a[1]) <= 0; };
    out[1].relations["Q"] = [](const Args& a) { return sign(a[0]) != 0; };
    out[1].relations["R"] = [](const Args& a) { return compare(a[0] * a[1], a[2]) < 0; };
    // sign of a sum
    out[2].relations["P"] = [sum](const Args& a) { return sign(sum(a)) > 0; };
    out[2].relations["Q"] = [](const Args& a) { return classify(a[0]) != Magnitude::unlimited; };
    out[2].relations["R"] = [sum](const Args& a) { return sign(sum(a)) == 0; };
    for (auto& in : out) {
        in.functions["F"] = [](const Args& a) { return a[0] * a[0]; };
        in.functions["G"] = [](const Args& a) { return a[0] * a[0] * a[0]; };
    }
    return out;
}

inline formula::Assignment standard_parameters() {
    auto R = [](long n, long d = 1) { return LCNum::from_rational(Rational(n, d)); };
    // d and e are the derivatives of F and G at c
    return {{"x", R(1, 2)}, {"c", R(1)}, {"d", R(2)}, {"e", R(3)}};
}

struct SemanticReport {
    long checks = 0;
    std::vector<std::string> counterexamples;
};

inline SemanticReport refute(const formula::Formula& in, const formula::Formula& out, std::size_t max_size) {
    SemanticReport rep;
    auto env = standard_parameters();
    auto interps = interpretations();
    for (const auto& g : grid_configurations(max_size))
        for (std::size_t k = 0; k < interps.size(); ++k) {
            ++rep.checks;
            bool a = formula::sample_semantics(in, g, interps[k], env);
            bool b = formula::sample_semantics(out, g, interps[k], env);
            if (a != b)
                rep.counterexamples.push_back(formula::print(in) + " [interpretation " + std::to_string(k) + ", " +
                                              std::to_string(g.infinitesimal.size()) + " infinitesimals, " +
                                              std::to_string(g.plain.size()) + " plain]");
        }
    return rep;
}

}  // namespace testsupport
