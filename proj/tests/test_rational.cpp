#include "doctest.h"
#include "risitl/rational.hpp"

using risitl::Rational;

TEST_CASE("rational arithmetic and normalization") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-2, -4) == Rational(1, 2));
    CHECK(Rational(1, -2) == Rational(-1, 2));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(1, 2) - Rational(1, 3) == Rational(1, 6));
    CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
    CHECK(Rational(1, 2) / Rational(1, 4) == Rational(2));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1) < Rational(0));
    CHECK_THROWS(Rational(1, 0));
    CHECK(((-Rational(3, 7)) + Rational(3, 7)).is_zero());
}

TEST_CASE("rational parsing") {
    CHECK(Rational::parse("3") == Rational(3));
    CHECK(Rational::parse("3/4") == Rational(3, 4));
    CHECK(Rational::parse("3.25") == Rational(13, 4));
    CHECK(Rational::parse("-0.5") == Rational(-1, 2));
    CHECK(Rational::parse("0.01") == Rational(1, 100));
    CHECK_THROWS(Rational::parse("abc"));
}

TEST_CASE("rational floor") {
    CHECK(Rational(7, 2).floor() == 3);
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(6, 3).floor() == 2);
}
