#include "doctest.h"
#include "risitl/accepts.hpp"
#include "risitl/compile.hpp"
#include "risitl/monitor.hpp"
#include "risitl/tst.hpp"

#include <random>

using namespace risitl;

namespace {

BooleanSignal random_signal(std::mt19937& rng, int props, const Rational& horizon) {
    BooleanSignal s;
    s.num_props = props;
    s.breakpoints.resize(static_cast<size_t>(props));
    s.horizon = horizon;
    std::uniform_int_distribution<int> nbp(0, 5);
    std::uniform_int_distribution<int> flag(0, 1);
    std::uniform_int_distribution<std::int64_t> num(1, 8 * 2);
    for (int p = 0; p < props; ++p) {
        std::vector<std::pair<Rational, bool>> bps;
        bool v = flag(rng) == 1;
        bps.emplace_back(Rational(0), v);
        int n = nbp(rng);
        std::vector<Rational> times;
        for (int i = 0; i < n; ++i) times.push_back(Rational(num(rng), 2));
        std::sort(times.begin(), times.end());
        for (const auto& t : times) {
            if (t == bps.back().first) continue;
            v = !v;
            bps.emplace_back(t, v);
        }
        s.breakpoints[static_cast<size_t>(p)] = std::move(bps);
    }
    return s;
}

// Formulas drawn from the compilable fragment.
Formula::Ptr random_supported(std::mt19937& rng, int props, int depth) {
    std::uniform_int_distribution<int> kind(0, depth == 0 ? 1 : 7);
    std::uniform_int_distribution<int> ap(0, props - 1);
    std::uniform_int_distribution<std::int64_t> len(1, 3);
    std::uniform_int_distribution<std::int64_t> lo(1, 2);
    std::uniform_int_distribution<int> shape(0, 4);
    auto bounded_iv = [&](bool allow_positive_lo) {
        switch (allow_positive_lo ? shape(rng) : shape(rng) % 4) {
            case 0: return FormulaInterval::make(Rational(0), false, Rational(len(rng)), false);
            case 1: return FormulaInterval::make(Rational(0), true, Rational(len(rng)), true);
            case 2: return FormulaInterval::ray(Rational(0), false);
            case 3: return FormulaInterval::ray(Rational(0), true);
            default: {
                Rational a(lo(rng));
                return FormulaInterval::make(a, true, a + Rational(len(rng)), true);
            }
        }
    };
    switch (kind(rng)) {
        case 0: return Formula::mk_atom(ap(rng));
        case 1: return Formula::mk_true();
        case 2: return Formula::mk_not(random_supported(rng, props, depth - 1));
        case 3:
            return Formula::mk_and(random_supported(rng, props, depth - 1),
                                   random_supported(rng, props, depth - 1));
        case 4:
            return Formula::mk_or(random_supported(rng, props, depth - 1),
                                  random_supported(rng, props, depth - 1));
        case 5:
            return Formula::mk_until(bounded_iv(false), random_supported(rng, props, depth - 1),
                                     random_supported(rng, props, depth - 1));
        case 6:
            return Formula::mk_eventually(bounded_iv(true), random_supported(rng, props, depth - 1));
        default:
            return Formula::mk_always(bounded_iv(true), random_supported(rng, props, depth - 1));
    }
}

bool oracle_accepts(const Formula::Ptr& f, const BooleanSignal& sig) {
    return mitl_sat_set(sig, f).contains(Rational(0));
}

bool machine_accepts(const Formula::Ptr& f, const BooleanSignal& sig) {
    MitlFormula mf;
    mf.root = normalize(f);
    mf.num_props = sig.num_props;
    for (int i = 0; i < sig.num_props; ++i) mf.prop_to_pred.push_back(i);
    return network_accepts(compile_mitl_network(mf), sig);
}

}  // namespace

TEST_CASE("gadgets are structurally well-formed") {
    for (auto op : {GadgetOp::Not, GadgetOp::EventuallyUnbounded}) {
        GadgetParams p;
        p.inputs = {BoolExpr::var(0)};
        p.output_var = 10;
        gadget_tst(op, p).check_well_formed();
    }
    GadgetParams u;
    u.inputs = {BoolExpr::var(0), BoolExpr::var(1)};
    u.output_var = 10;
    gadget_tst(GadgetOp::UntilUnbounded, u).check_well_formed();

    GadgetParams fb;
    fb.inputs = {BoolExpr::var(0)};
    fb.output_var = 10;
    fb.bound = Rational(2);
    gadget_tst(GadgetOp::EventuallyBounded, fb).check_well_formed();
    gadget_tst(GadgetOp::EventuallyBoundedClosed, fb).check_well_formed();

    GadgetParams d;
    d.inputs = {BoolExpr::var(0)};
    d.output_var = 10;
    d.bound = Rational(3);
    d.pending_slots = 2;
    gadget_tst(GadgetOp::Delay, d).check_well_formed();

    CHECK_THROWS(gadget_tst(GadgetOp::Not, u));
}

TEST_CASE("synchronous product: unit element and counts") {
    GadgetParams pn;
    pn.inputs = {BoolExpr::var(0)};
    pn.output_var = 5;
    auto not_g = gadget_tst(GadgetOp::Not, pn);

    // single-state always-true transducer
    GadgetParams pt;
    pt.output_var = 6;
    auto unit = gadget_tst(GadgetOp::ConstTrue, pt);

    auto prod = synchronous_product(not_g, unit);
    CHECK(prod.states.size() == not_g.states.size() * unit.states.size());
    // left-sided copies of the operand transitions plus the initial pairs
    CHECK(prod.states.size() == not_g.states.size());

    GadgetParams pu;
    pu.inputs = {BoolExpr::var(1), BoolExpr::var(2)};
    pu.output_var = 7;
    auto until_g = gadget_tst(GadgetOp::UntilUnbounded, pu);
    auto prod2 = synchronous_product(not_g, until_g);
    CHECK(prod2.states.size() == not_g.states.size() * until_g.states.size());
    CHECK(prod2.acceptance.size() == 1);  // one lifted member from the until side

    GadgetParams pu2;
    pu2.inputs = {BoolExpr::var(3)};
    pu2.output_var = 8;
    auto f_g = gadget_tst(GadgetOp::EventuallyUnbounded, pu2);
    auto prod3 = synchronous_product(until_g, f_g);
    CHECK(prod3.acceptance.size() == 2);  // both sides carry a Buchi member
    prod3.check_well_formed();
}

TEST_CASE("io composition restricts pairs and keeps free inputs") {
    // atom feed into And's left input leaves the right input free
    GadgetParams pa;
    pa.inputs = {BoolExpr::var(0), BoolExpr::tru()};
    pa.output_var = 5;
    auto pass = gadget_tst(GadgetOp::And, pa);  // pass-through of var 0 -> wire 5

    GadgetParams pand;
    pand.inputs = {BoolExpr::var(5), BoolExpr::var(1)};
    pand.output_var = 6;
    auto and_g = gadget_tst(GadgetOp::And, pand);

    auto comp = io_compose(pass, and_g);
    comp.check_well_formed();
    CHECK(comp.output_vars == std::vector<int>{6});
    CHECK(std::find(comp.input_vars.begin(), comp.input_vars.end(), 1) != comp.input_vars.end());
    CHECK(std::find(comp.input_vars.begin(), comp.input_vars.end(), 5) == comp.input_vars.end());
    CHECK(comp.states.size() <= pass.states.size() * and_g.states.size());

    GadgetParams multi;
    multi.inputs = {BoolExpr::var(0), BoolExpr::var(1)};
    multi.output_var = 9;
    auto two_out = synchronous_product(pass, and_g);
    CHECK_THROWS(io_compose(two_out, and_g));
}

TEST_CASE("compile: pass-through and simple acceptance") {
    // phi = p
    auto f = Formula::mk_atom(0);
    BooleanSignal on = BooleanSignal::constant(1, {true}, Rational(10));
    BooleanSignal off = BooleanSignal::constant(1, {false}, Rational(10));
    CHECK(machine_accepts(f, on));
    CHECK_FALSE(machine_accepts(f, off));

    // always-true formula accepts anything
    CHECK(machine_accepts(Formula::mk_true(), off));

    // F[0,3] p with p never true
    auto f2 = Formula::mk_eventually(FormulaInterval::closed(Rational(0), Rational(3)),
                                     Formula::mk_atom(0));
    CHECK_FALSE(machine_accepts(f2, off));
    CHECK(machine_accepts(f2, on));
}

TEST_CASE("compile: anticipation and unbounded always") {
    // F(0,2) p with p true on [1, 1.5)
    BooleanSignal s;
    s.num_props = 1;
    s.breakpoints.resize(1);
    s.horizon = Rational(10);
    s.set_segments(0, {{Rational(0), false}, {Rational(1), true}, {Rational(3, 2), false}});
    auto f = Formula::mk_eventually(FormulaInterval::make(Rational(0), false, Rational(2), false),
                                    Formula::mk_atom(0));
    CHECK(machine_accepts(f, s));
    CHECK(oracle_accepts(f, s));

    // G(0,inf) p with p false on (3,4): rejected
    BooleanSignal s2;
    s2.num_props = 1;
    s2.breakpoints.resize(1);
    s2.horizon = Rational(10);
    s2.set_segments(0, {{Rational(0), true}, {Rational(3), false}, {Rational(4), true}});
    auto g = Formula::mk_always(FormulaInterval::ray(Rational(0), false), Formula::mk_atom(0));
    CHECK_FALSE(machine_accepts(g, s2));
    CHECK_FALSE(oracle_accepts(g, s2));
    BooleanSignal s3 = BooleanSignal::constant(1, {true}, Rational(10));
    CHECK(machine_accepts(g, s3));
}

TEST_CASE("oracle equivalence per operator") {
    std::mt19937 rng(2024);
    auto check_formula = [&](const Formula::Ptr& f, int cases) {
        for (int i = 0; i < cases; ++i) {
            auto sig = random_signal(rng, 2, Rational(100));
            bool a = machine_accepts(f, sig);
            bool b = oracle_accepts(f, sig);
            if (a != b) {
                CAPTURE(f->str());
                CAPTURE(sig.breakpoints[0].size());
                std::string desc;
                for (int p = 0; p < sig.num_props; ++p)
                    for (auto& [t, v] : sig.breakpoints[(size_t)p])
                        desc += "p" + std::to_string(p) + "@" + t.str() + "=" + (v ? "1" : "0") + " ";
                CAPTURE(desc);
            }
            REQUIRE(a == b);
        }
    };
    auto p0 = Formula::mk_atom(0);
    auto p1 = Formula::mk_atom(1);
    check_formula(Formula::mk_not(p0), 50);
    check_formula(Formula::mk_and(p0, p1), 50);
    check_formula(Formula::mk_until(FormulaInterval::ray(Rational(0), false), p0, p1), 300);
    check_formula(Formula::mk_until(FormulaInterval::ray(Rational(0), true), p0, p1), 300);
    check_formula(
        Formula::mk_eventually(FormulaInterval::make(Rational(0), false, Rational(2), false), p0),
        300);
    check_formula(
        Formula::mk_eventually(FormulaInterval::make(Rational(0), true, Rational(2), true), p0),
        300);
    check_formula(
        Formula::mk_eventually(FormulaInterval::make(Rational(1), true, Rational(3), true), p0),
        300);
    check_formula(
        Formula::mk_always(FormulaInterval::make(Rational(0), true, Rational(2), true), p0), 300);
    check_formula(
        Formula::mk_always(FormulaInterval::make(Rational(2), true, Rational(4), true), p0), 300);
    check_formula(Formula::mk_until(FormulaInterval::make(Rational(0), false, Rational(2), false),
                                    p0, p1),
                  300);
    check_formula(Formula::mk_until(FormulaInterval::make(Rational(0), true, Rational(2), true),
                                    p0, p1),
                  300);
}

TEST_CASE("oracle equivalence on random depth-3 formulas") {
    std::mt19937 rng(31337);
    int done = 0;
    while (done < 300) {
        auto f = random_supported(rng, 2, 3);
        auto sig = random_signal(rng, 2, Rational(100));
        bool a, b;
        b = oracle_accepts(f, sig);
        a = machine_accepts(f, sig);
        if (a != b) {
            CAPTURE(f->str());
            std::string desc;
            for (int p = 0; p < sig.num_props; ++p)
                for (auto& [t, v] : sig.breakpoints[(size_t)p])
                    desc += "p" + std::to_string(p) + "@" + t.str() + "=" + (v ? "1" : "0") + " ";
            CAPTURE(desc);
        }
        REQUIRE(a == b);
        ++done;
    }
}

TEST_CASE("compiling twice yields identical structure") {
    auto f = Formula::mk_eventually(FormulaInterval::make(Rational(0), false, Rational(2), false),
                                    Formula::mk_atom(0));
    MitlFormula mf;
    mf.root = normalize(f);
    mf.num_props = 1;
    mf.prop_to_pred = {0};
    auto t1 = compile_mitl(mf);
    auto t2 = compile_mitl(mf);
    CHECK(t1.states.size() == t2.states.size());
    CHECK(t1.transitions.size() == t2.transitions.size());
    CHECK(t1.num_clocks == t2.num_clocks);
    CHECK(t1.dump_json() == t2.dump_json());
}
