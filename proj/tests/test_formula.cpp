#include "doctest.h"
#include "risitl/formula.hpp"

using namespace risitl;

namespace {

PredicateTable demo_table() {
    PredicateTable t;
    Eigen::VectorXd a(2);
    a << -1, 0;
    t.add("mu1", a, 3.0, 0.5);
    a << -1, 0;
    t.add("mu2", a, 4.0, 0.1);
    a << 1, 0;
    t.add("g1", a, -1.0, 0.1);
    a << 0, 1;
    t.add("g2", a, -2.0, 0.1);
    return t;
}

}  // namespace

TEST_CASE("predicate table normalizes to unit normals") {
    PredicateTable t;
    Eigen::VectorXd a(2);
    a << 3, 4;
    int i = t.add("p", a, 10.0, 0.25);
    CHECK(t.at(i).a.norm() == doctest::Approx(1.0));
    CHECK(t.at(i).a(0) == doctest::Approx(0.6));
    CHECK(t.at(i).b == doctest::Approx(2.0));
    CHECK_THROWS(t.add("q", Eigen::VectorXd::Zero(2), 0.0, 0.5));
    CHECK_THROWS(t.add("r", a, 0.0, 1.0));
}

TEST_CASE("parser handles the documented grammar") {
    auto t = demo_table();
    auto f = parse_risitl("F[0,3] (g1 & g2)", t);
    REQUIRE(f->kind == FormulaKind::Eventually);
    CHECK(f->interval.lo == Rational(0));
    CHECK(f->interval.hi == Rational(3));
    CHECK(f->lhs->kind == FormulaKind::And);

    auto top = parse_risitl("T", t);
    CHECK(top->kind == FormulaKind::True);

    auto nested = parse_risitl("G[3,49](F[0,11] g2 & F[11,23] g1)", t);
    REQUIRE(nested->kind == FormulaKind::Always);
    CHECK(nested->interval.hi == Rational(49));
    CHECK(nested->lhs->kind == FormulaKind::And);
    CHECK(horizon(nested).value() == Rational(72));

    auto u = parse_risitl("mu1 U(0,inf) mu2", t);
    REQUIRE(u->kind == FormulaKind::Until);
    CHECK(u->interval.unbounded);
    CHECK_FALSE(u->interval.lo_closed);

    auto cyc = parse_risitl("cycle[3,23,2](F[0,11] g2)", t);
    REQUIRE(cyc->kind == FormulaKind::Periodic);
    CHECK(cyc->period == Rational(23));
    CHECK(cyc->repetitions.value() == 2);
}

TEST_CASE("parser reports position on errors") {
    auto t = demo_table();
    CHECK_THROWS_AS(parse_risitl("F[0,3] unknown_pred", t), ParseError);
    CHECK_THROWS_AS(parse_risitl("F[3,3] g1", t), ParseError);  // singleton
    CHECK_THROWS_AS(parse_risitl("F[0,3] (g1", t), ParseError);
    try {
        parse_risitl("F[0,3] unknown_pred", t);
    } catch (const ParseError& e) {
        CHECK(e.position == 7);
    }
}

TEST_CASE("normalize reaches the core fragment and is idempotent") {
    auto t = demo_table();
    auto f = parse_risitl("G[0,1] mu1 | F[0,2] mu2", t);
    auto n = normalize(f);

    // Or(a,b) -> !( !a & !b ); G -> !(T U !phi); F -> T U phi
    std::vector<const Formula*> stack{n.get()};
    while (!stack.empty()) {
        const Formula* cur = stack.back();
        stack.pop_back();
        bool core = cur->kind == FormulaKind::True || cur->kind == FormulaKind::Atom ||
                    cur->kind == FormulaKind::Not || cur->kind == FormulaKind::And ||
                    cur->kind == FormulaKind::Until;
        CHECK(core);
        if (cur->lhs) stack.push_back(cur->lhs.get());
        if (cur->rhs) stack.push_back(cur->rhs.get());
    }
    CHECK(structurally_equal(normalize(n), n));

    auto or_f = Formula::mk_or(Formula::mk_atom(0), Formula::mk_atom(1));
    auto or_n = normalize(or_f);
    CHECK(or_n->kind == FormulaKind::Not);
    CHECK(or_n->lhs->kind == FormulaKind::And);

    auto g = parse_risitl("G[0,1] mu1", t);
    auto gn = normalize(g);
    REQUIRE(gn->kind == FormulaKind::Not);
    REQUIRE(gn->lhs->kind == FormulaKind::Until);
    CHECK(gn->lhs->lhs->kind == FormulaKind::True);
    CHECK(gn->lhs->rhs->kind == FormulaKind::Not);

    auto core = parse_risitl("mu1 U[0,2] mu2", t);
    CHECK(structurally_equal(normalize(core), core));
}

TEST_CASE("abstract_to_mitl is a bijection onto used predicates") {
    auto t = demo_table();
    auto f = parse_risitl("(mu1 & mu2) | F[0,1] mu1", t);
    auto mf = abstract_to_mitl(f);
    CHECK(mf.num_props == 2);  // mu1 reused twice -> one proposition
    CHECK(mf.prop_to_pred[0] == t.index_of("mu1"));
    CHECK(mf.prop_to_pred[1] == t.index_of("mu2"));
    CHECK(structurally_equal(substitute_predicates(mf), f));
}

TEST_CASE("horizon") {
    auto t = demo_table();
    CHECK(horizon(parse_risitl("F[0,3] mu1", t)).value() == Rational(3));
    CHECK(horizon(parse_risitl("G[3,49] F[11,23] mu1", t)).value() == Rational(72));
    CHECK_FALSE(horizon(parse_risitl("G[0,inf) mu1", t)).has_value());
    CHECK(horizon(parse_risitl("cycle[3,23,2](F[0,11] g2 & F[11,23] g1)", t)).value() ==
          Rational(3 + 23 + 23));
}

TEST_CASE("flatten_periodic expands shifted obligations") {
    auto t = demo_table();
    auto f = parse_risitl("cycle[3,23,2](F[0,11] g2 & F[11,23] g1)", t);
    auto flat = flatten_periodic(f, 1);
    REQUIRE(flat->kind == FormulaKind::And);
    // instance k=0: F[3,14] g2 & F[14,26] g1 ; k=1: F[26,37] g2 & F[37,49] g1
    auto k0 = flat->lhs;
    auto k1 = flat->rhs;
    REQUIRE(k0->kind == FormulaKind::And);
    CHECK(k0->lhs->interval.lo == Rational(3));
    CHECK(k0->lhs->interval.hi == Rational(14));
    CHECK(k0->rhs->interval.lo == Rational(14));
    CHECK(k0->rhs->interval.hi == Rational(26));
    CHECK(k1->lhs->interval.lo == Rational(26));
    CHECK(k1->rhs->interval.hi == Rational(49));
}
