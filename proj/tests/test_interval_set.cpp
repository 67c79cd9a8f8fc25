#include "doctest.h"
#include "risitl/interval_set.hpp"

using namespace risitl;

namespace {
TimeInterval iv(std::int64_t a, bool ac, std::int64_t b, bool bc) {
    return {Rational(a), Rational(b), ac, bc, false};
}
}  // namespace

TEST_CASE("interval set canonicalization merges touching parts") {
    IntervalSet s;
    s.add(iv(0, true, 1, false));
    s.add(iv(1, true, 2, true));
    REQUIRE(s.size() == 1);
    CHECK(s.parts()[0].lo == Rational(0));
    CHECK(s.parts()[0].hi == Rational(2));

    IntervalSet t;
    t.add(iv(0, false, 1, false));
    t.add(iv(1, false, 2, false));
    CHECK(t.size() == 2);  // the point 1 is missing: not adjacent
}

TEST_CASE("complement keeps endpoint flags exact") {
    IntervalSet s;
    s.add(iv(1, true, 2, false));
    auto c = set_complement(s);
    REQUIRE(c.size() == 2);
    CHECK(c.parts()[0].lo == Rational(0));
    CHECK(c.parts()[0].hi == Rational(1));
    CHECK(c.parts()[0].hi_closed == false);
    CHECK(c.parts()[1].lo == Rational(2));
    CHECK(c.parts()[1].lo_closed == true);
    CHECK(c.parts()[1].hi_inf);
    CHECK(set_complement(c) == s);
}

TEST_CASE("complement of isolated missing point") {
    IntervalSet s;
    s.add(iv(0, true, 1, false));
    s.add(iv(1, false, 3, true));
    auto c = set_complement(s);
    REQUIRE(c.size() == 2);
    CHECK(c.parts()[0].lo == Rational(1));
    CHECK(c.parts()[0].hi == Rational(1));
    CHECK(c.parts()[0].lo_closed);
    CHECK(c.parts()[0].hi_closed);
}

TEST_CASE("intersection respects openness") {
    IntervalSet a = IntervalSet::single(iv(0, true, 2, false));
    IntervalSet b = IntervalSet::single(iv(1, false, 3, true));
    auto i = set_intersect(a, b);
    REQUIRE(i.size() == 1);
    CHECK(i.parts()[0].lo == Rational(1));
    CHECK_FALSE(i.parts()[0].lo_closed);
    CHECK(i.parts()[0].hi == Rational(2));
    CHECK_FALSE(i.parts()[0].hi_closed);
}

TEST_CASE("back shift implements Minkowski difference with flags") {
    // p true on [1, 1.5); F(0,2): expect [0, 1.5) after clipping at 0
    IntervalSet s = IntervalSet::single({Rational(1), Rational(3, 2), true, false, false});
    auto r = s.back_shift(Rational(0), false, Rational(2), false);
    REQUIRE(r.size() == 1);
    CHECK(r.parts()[0].lo == Rational(0));
    CHECK(r.parts()[0].lo_closed);
    CHECK(r.parts()[0].hi == Rational(3, 2));
    CHECK_FALSE(r.parts()[0].hi_closed);
    CHECK(r.contains(Rational(0)));

    // unbounded I
    auto u = s.back_shift(Rational(0), true, std::nullopt, false);
    REQUIRE(u.size() == 1);
    CHECK(u.parts()[0].lo == Rational(0));
    CHECK(u.parts()[0].hi == Rational(3, 2));
}

TEST_CASE("membership") {
    IntervalSet s;
    s.add(iv(1, false, 2, true));
    CHECK_FALSE(s.contains(Rational(1)));
    CHECK(s.contains(Rational(3, 2)));
    CHECK(s.contains(Rational(2)));
    CHECK_FALSE(s.contains(Rational(5, 2)));
}
