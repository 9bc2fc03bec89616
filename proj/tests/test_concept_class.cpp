#include "doctest.h"

#include <set>
#include <vector>

#include "agb/concept_class.hpp"

using namespace agb;

TEST_CASE("decision tree evaluation follows bit-indexed branches") {
    // if x2 == 0 then -1 else (if x0 == 0 then +1 else -1)
    DecisionTree t;
    t.n = 3;
    t.nodes = {
        {2, 0.0, 1, 2},    // root splits on bit 2
        {-1, -1.0, -1, -1},
        {0, 0.0, 3, 4},    // right branch splits on bit 0
        {-1, 1.0, -1, -1},
        {-1, -1.0, -1, -1},
    };
    t.root = 0;
    CHECK(t.eval(0b000) == -1.0);
    CHECK(t.eval(0b011) == -1.0);
    CHECK(t.eval(0b100) == 1.0);
    CHECK(t.eval(0b101) == -1.0);
    CHECK(t.eval(0b110) == 1.0);
    CHECK(t.leaf_count() == 3);
    BoundedFn f = t.to_fn();
    CHECK(f.is_boolean());
    for (uint64_t x = 0; x < 8; ++x) CHECK(f(x) == t.eval(x));
}

TEST_CASE("parity class enumerates every mask lazily") {
    ConceptClass c = ConceptClass::all_parities(4);
    CHECK(c.size() == 16);
    CHECK(c.negation_closed());
    CHECK(c.kind_name() == "all-parities");
    CHECK(c.member(0)(0b1011) == 1.0);    // empty parity is the constant +1
    CHECK(c.member(0b101)(0b100) == -1.0);
    CHECK(c.member_name(0) == "parity:0");
    CHECK(c.member_name(0x29f & 0xF) == "parity:f");
    // Lazy enumeration means wide parity classes construct instantly.
    ConceptClass wide = ConceptClass::all_parities(24);
    CHECK(wide.size() == (uint64_t{1} << 24));
    CHECK(wide.member_name(0x29f) == "parity:29f");
    CHECK_THROWS_AS(c.member(16), std::out_of_range);
}

TEST_CASE("tree classes deduplicate by truth table") {
    // One variable, up to two leaves: the two constants, identity, negation.
    ConceptClass c1 = ConceptClass::enumerated_trees(1, 2);
    CHECK(c1.size() == 4);
    CHECK(c1.negation_closed());

    // Two variables, up to four leaves: every boolean function of two bits.
    ConceptClass c2 = ConceptClass::enumerated_trees(2, 4);
    CHECK(c2.size() == 16);
    std::set<std::vector<double>> tables;
    for (uint64_t i = 0; i < c2.size(); ++i) {
        BoundedFn f = c2.member(i);
        std::vector<double> t = f.table(Domain(2));
        CHECK(tables.insert(t).second);  // no duplicates
        CHECK(f.is_boolean());
    }
    CHECK(tables.size() == 16);
    CHECK_THROWS_AS(ConceptClass::enumerated_trees(2, 0), std::invalid_argument);
}

TEST_CASE("small tree classes contain the planted stump") {
    ConceptClass c = ConceptClass::enumerated_trees(4, 2);
    // 2 constants + (stump on each of 4 vars, 2 orientations) = 10 functions.
    CHECK(c.size() == 10);
    bool found = false;
    for (uint64_t i = 0; i < c.size(); ++i) {
        BoundedFn f = c.member(i);
        if (f(0b0000) == -1.0 && f(0b0100) == 1.0 && f(0b1011) == -1.0 && f(0b0111) == 1.0)
            found = true;  // the stump x2
    }
    CHECK(found);
}

TEST_CASE("conjunction classes enumerate widths in order including the empty one") {
    ConceptClass c = ConceptClass::conjunctions(3, 2);
    // 1 empty + 3*2 single literals + 3*4 two-literal = 19.
    CHECK(c.size() == 19);
    CHECK_FALSE(c.negation_closed());
    BoundedFn empty = c.member(0);
    for (uint64_t x = 0; x < 8; ++x) CHECK(empty(x) == 1.0);
    // Member 1 is the first single literal (variable 0, positive).
    BoundedFn lit = c.member(1);
    int pos = 0;
    for (uint64_t x = 0; x < 8; ++x) pos += lit(x) > 0;
    CHECK(pos == 4);
    // A width-2 conjunction accepts exactly a quarter of the cube.
    BoundedFn last = c.member(18);
    int acc = 0;
    for (uint64_t x = 0; x < 8; ++x) acc += last(x) > 0;
    CHECK(acc == 2);
    CHECK(c.member_name(0) == "conjunctions:0");
    CHECK_THROWS_AS(ConceptClass::conjunctions(3, 4), std::invalid_argument);
    CHECK_THROWS_AS(ConceptClass::conjunctions(3, -1), std::invalid_argument);
}

TEST_CASE("full-width conjunction class counts three-to-the-n members") {
    ConceptClass c = ConceptClass::conjunctions(4, 4);
    CHECK(c.size() == 81);  // sum_k C(4,k) 2^k = 3^4
}

TEST_CASE("explicit classes validate membership and width") {
    std::vector<BoundedFn> ms = {BoundedFn::parity(3, 1), BoundedFn::constant(2, 1.0)};
    ConceptClass c = ConceptClass::explicit_list(3, ms, true);
    CHECK(c.size() == 2);
    CHECK(c.negation_closed());
    CHECK(c.member_name(1) == "explicit:1");
    CHECK_THROWS_AS(ConceptClass::explicit_list(3, {}), std::invalid_argument);
    CHECK_THROWS_AS(ConceptClass::explicit_list(2, {BoundedFn::parity(3, 4)}),
                    std::invalid_argument);
}

TEST_CASE("enumeration budgets reject oversized classes") {
    std::vector<BoundedFn> huge(kMaxClassMembers + 1, BoundedFn::constant(1, 1.0));
    CHECK_THROWS_AS(ConceptClass::explicit_list(1, std::move(huge)), std::invalid_argument);
}

TEST_CASE("mask hex strings are minimal lowercase") {
    CHECK(mask_hex(0) == "0");
    CHECK(mask_hex(0x29f) == "29f");
    CHECK(mask_hex(0xABCDEF) == "abcdef");
    CHECK(mask_hex(1) == "1");
}
