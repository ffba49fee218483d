#include "hyperlab/thick.hpp"
#include "support.hpp"
#include "thick_oracle.hpp"

#include <doctest.h>

using namespace hyperlab::thick;
using testsupport::error_name;

TEST_CASE("family rules") {
    auto f = parse_family("contains(2) & !atleast(4)");
    CHECK(f.member({2, 7}));
    CHECK_FALSE(f.member({7}));
    CHECK_FALSE(f.member({1, 2, 3, 4}));
    CHECK(f.designated() == std::set<long>{2});
    CHECK(parse_family(f.to_string()).to_string() == f.to_string());
    CHECK_THROWS_AS((void)parse_family("contains(2) &"), hyperlab::SyntaxError);
}

TEST_CASE("nu for a single designated element") {
    auto rs = thickness_nu(FinFamily::contains(5), 8);
    for (const auto& r : rs) {
        REQUIRE(r.nu);
        CHECK(*r.nu == r.m + 1);
    }
}

TEST_CASE("nu of all finite sets is the identity") {
    for (const auto& r : thickness_nu(FinFamily::all(), 6)) CHECK(*r.nu == r.m);
}

TEST_CASE("a cardinality ceiling is thin past it") {
    auto rs = thickness_nu(FinFamily::at_most(3), 5);
    CHECK(rs[3].nu);
    REQUIRE(rs[4].thin_witness);
    CHECK(rs[4].thin_witness->size() == 4);
    CHECK_FALSE(thick_up_to(FinFamily::at_most(3), 4));
}

TEST_CASE("symmetry reduction matches brute force") {
    for (const char* s : {"contains(1) & contains(3)", "atleast(3) | contains(0)", "contains(2) & !atleast(5)",
                          "!contains(4)", "(contains(0) | contains(1)) & atleast(2)", "atmost(2) & contains(1)"}) {
        auto fam = parse_family(s);
        auto rs = thickness_nu(fam, 4);
        for (const auto& r : rs) CHECK_MESSAGE(r.nu == testsupport::brute_nu(fam, r.m), s << " at m=" << r.m);
    }
}

TEST_CASE("diagonal union of a descending chain") {
    std::vector<FinFamily> chain;
    FinFamily acc = FinFamily::contains(0);
    for (long n = 0; n <= 3; ++n) {
        if (n > 0) acc = acc & FinFamily::contains(n);
        chain.push_back(acc);
    }
    auto rep = diagonal_thick(chain, 5);
    CHECK(rep.thick);
    REQUIRE(rep.bounds.size() == 4);
    // each guard is nu_{p_m}(m)
    for (long m = 0; m < 4; ++m) CHECK(rep.guards[m] == *testsupport::brute_nu(chain[m], m));
    CHECK(rep.bounds[2].k == std::max(rep.guards[0], rep.guards[1]));
    for (const auto& b : rep.bounds) CHECK(b.observed <= b.k);

    auto single = diagonal_thick({FinFamily::contains(0)}, 3);
    CHECK(single.thick);
    CHECK(single.bounds[0].observed == -1);
}

TEST_CASE("diagonal union rejects bad chains") {
    CHECK(error_name([] { (void)diagonal_thick({FinFamily::at_most(0), FinFamily::at_most(0)}, 2); }) == "not-thick");
    CHECK(error_name([] { (void)diagonal_thick({FinFamily::contains(0), FinFamily::contains(1)}, 2); }) ==
          "not-descending");
}
