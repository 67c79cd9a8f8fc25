#include "doctest.h"
#include "risitl/monitor.hpp"
#include "risitl/risk.hpp"

#include <random>

using namespace risitl;

namespace {

BooleanSignal sig1(std::vector<std::pair<Rational, bool>> p_bps, const Rational& horizon) {
    BooleanSignal s;
    s.num_props = 1;
    s.horizon = horizon;
    s.breakpoints.resize(1);
    s.set_segments(0, std::move(p_bps));
    return s;
}

Formula::Ptr atom(int i) { return Formula::mk_atom(i); }

// Random formula over `props` atoms with depth bound; used for the
// normalize-preserves-verdicts property.
Formula::Ptr random_formula(std::mt19937& rng, int props, int depth) {
    std::uniform_int_distribution<int> kind(0, depth == 0 ? 1 : 6);
    std::uniform_int_distribution<int> ap(0, props - 1);
    std::uniform_int_distribution<int> lo_d(0, 2);
    std::uniform_int_distribution<int> len_d(1, 4);
    std::uniform_int_distribution<int> flag(0, 1);
    switch (kind(rng)) {
        case 0: return atom(ap(rng));
        case 1: return Formula::mk_true();
        case 2: return Formula::mk_not(random_formula(rng, props, depth - 1));
        case 3:
            return Formula::mk_and(random_formula(rng, props, depth - 1),
                                   random_formula(rng, props, depth - 1));
        case 4:
            return Formula::mk_or(random_formula(rng, props, depth - 1),
                                  random_formula(rng, props, depth - 1));
        default: {
            Rational lo(lo_d(rng));
            Rational hi = lo + Rational(len_d(rng));
            bool lc = flag(rng), hc = flag(rng);
            auto iv = FormulaInterval::make(lo, lc, hi, hc);
            if (kind(rng) == 5)
                return Formula::mk_until(iv, random_formula(rng, props, depth - 1),
                                         random_formula(rng, props, depth - 1));
            return flag(rng) ? Formula::mk_eventually(iv, random_formula(rng, props, depth - 1))
                             : Formula::mk_always(iv, random_formula(rng, props, depth - 1));
        }
    }
}

BooleanSignal random_signal(std::mt19937& rng, int props, const Rational& horizon) {
    BooleanSignal s;
    s.num_props = props;
    s.breakpoints.resize(static_cast<size_t>(props));
    s.horizon = horizon;
    std::uniform_int_distribution<int> nbp(0, 5);
    std::uniform_int_distribution<int> flag(0, 1);
    std::uniform_int_distribution<std::int64_t> num(1, 4 * 8);
    for (int p = 0; p < props; ++p) {
        std::vector<std::pair<Rational, bool>> bps;
        bool v = flag(rng) == 1;
        bps.emplace_back(Rational(0), v);
        int n = nbp(rng);
        std::vector<Rational> times;
        for (int i = 0; i < n; ++i) times.push_back(Rational(num(rng), 4));
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

}  // namespace

TEST_CASE("atom satisfaction sets from breakpoints") {
    auto s = sig1({{Rational(0), false}, {Rational(1), true}, {Rational(3, 2), false}}, Rational(10));
    auto sat = s.atom_sat(0);
    REQUIRE(sat.size() == 1);
    CHECK(sat.parts()[0].lo == Rational(1));
    CHECK(sat.parts()[0].lo_closed);
    CHECK(sat.parts()[0].hi == Rational(3, 2));
    CHECK_FALSE(sat.parts()[0].hi_closed);
}

TEST_CASE("eventually includes anticipation through the open interval") {
    // p true on [1,1.5), f = F(0,2) p: sat set includes t=0
    auto s = sig1({{Rational(0), false}, {Rational(1), true}, {Rational(3, 2), false}}, Rational(10));
    auto f = Formula::mk_eventually(FormulaInterval::make(Rational(0), false, Rational(2), false),
                                    atom(0));
    CHECK(mitl_satisfies(s, f, Rational(0)));

    // p false everywhere: F[0,3] p empty
    auto s2 = sig1({{Rational(0), false}}, Rational(10));
    auto f2 = Formula::mk_eventually(FormulaInterval::closed(Rational(0), Rational(3)), atom(0));
    CHECK(mitl_sat_set(s2, f2).empty());

    CHECK(mitl_sat_set(s2, Formula::mk_true()).contains(Rational(7)));
}

TEST_CASE("always semantics at endpoints") {
    // p true on [0,5], G[0,3] p at 0 -> true
    auto s = sig1({{Rational(0), true}, {Rational(5), false}}, Rational(10));
    auto g = Formula::mk_always(FormulaInterval::closed(Rational(0), Rational(3)), atom(0));
    CHECK(mitl_satisfies(s, g, Rational(0)));

    // p true on [0,2) only: G[0,3] p at 0 -> false
    auto s2 = sig1({{Rational(0), true}, {Rational(2), false}}, Rational(10));
    CHECK_FALSE(mitl_satisfies(s2, g, Rational(0)));

    // boundary: p true on [0,3): G[0,3] fails exactly because of the endpoint
    auto s3 = sig1({{Rational(0), true}, {Rational(3), false}}, Rational(10));
    CHECK_FALSE(mitl_satisfies(s3, g, Rational(0)));
    auto g_open = Formula::mk_always(FormulaInterval::make(Rational(0), true, Rational(3), false),
                                     atom(0));
    CHECK(mitl_satisfies(s3, g_open, Rational(0)));
}

TEST_CASE("until uses the open continuity interval") {
    // q becomes true at 2 while p holds on (0,2): p U[0,3] q at 0
    BooleanSignal s;
    s.num_props = 2;
    s.breakpoints.resize(2);
    s.horizon = Rational(10);
    s.set_segments(0, {{Rational(0), true}, {Rational(2), false}});
    s.set_segments(1, {{Rational(0), false}, {Rational(2), true}});
    auto u = Formula::mk_until(FormulaInterval::closed(Rational(0), Rational(3)), atom(0), atom(1));
    CHECK(mitl_satisfies(s, u, Rational(0)));

    // p itself need not hold at t: until looks at (t, t'') open
    BooleanSignal s2;
    s2.num_props = 2;
    s2.breakpoints.resize(2);
    s2.horizon = Rational(10);
    s2.set_segments(0, {{Rational(0), false}, {Rational(1, 2), true}});  // p false at 0 exactly
    s2.set_segments(1, {{Rational(0), false}, {Rational(2), true}});
    CHECK_FALSE(mitl_satisfies(s2, u, Rational(0)));  // p false on (0, 1/2)

    // witness at t''=t with 0 in I: q true at t suffices
    BooleanSignal s3;
    s3.num_props = 2;
    s3.breakpoints.resize(2);
    s3.horizon = Rational(10);
    s3.set_segments(0, {{Rational(0), false}});
    s3.set_segments(1, {{Rational(0), true}});
    CHECK(mitl_satisfies(s3, u, Rational(0)));
    auto u_open = Formula::mk_until(FormulaInterval::make(Rational(0), false, Rational(3), true),
                                    atom(0), atom(1));
    CHECK_FALSE(mitl_satisfies(s3, u_open, Rational(0)));  // 0 not in (0,3]
}

TEST_CASE("horizon precondition enforced") {
    auto s = sig1({{Rational(0), true}}, Rational(2));
    auto f = Formula::mk_eventually(FormulaInterval::closed(Rational(0), Rational(3)), atom(0));
    CHECK_THROWS(mitl_satisfies(s, f, Rational(0)));
}

TEST_CASE("de morgan duality on random formula/signal pairs") {
    std::mt19937 rng(7);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        auto f = random_formula(rng, 2, 3);
        auto sig = random_signal(rng, 2, Rational(100));
        auto nn = Formula::mk_not(Formula::mk_not(f));
        CHECK(mitl_sat_set(sig, nn) == mitl_sat_set(sig, f));
        // G_I f == complement-based evaluation of !F_I !f
        auto iv = FormulaInterval::closed(Rational(1), Rational(3));
        auto g = Formula::mk_always(iv, f);
        auto dual = Formula::mk_not(Formula::mk_eventually(iv, Formula::mk_not(f)));
        CHECK(mitl_sat_set(sig, g) == mitl_sat_set(sig, dual));
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("normalization preserves monitor verdicts") {
    std::mt19937 rng(11);
    for (int i = 0; i < 1000; ++i) {
        auto f = random_formula(rng, 2, 3);
        auto sig = random_signal(rng, 2, Rational(200));
        CHECK(mitl_sat_set(sig, f) == mitl_sat_set(sig, normalize(f)));
    }
}

TEST_CASE("booleanization applies the DR-tightened predicate") {
    PredicateTable t;
    Eigen::VectorXd a(2);
    a << -1, 0;
    t.add("goal", a, 3.0, 0.5);

    BeliefPath path;
    path.step = Rational(1, 100);
    BeliefSample s0;
    s0.mean = Eigen::VectorXd::Zero(2);
    s0.cov = Eigen::MatrixXd::Zero(2, 2);
    path.samples = {s0, s0};
    auto g = Formula::mk_always(FormulaInterval::make(Rational(0), true, Rational(1, 100), false),
                                Formula::mk_atom(0));
    CHECK(risitl_satisfies(path, g, t, Rational(0)));

    // x=(2.95,0), P=diag(0.0101), eta=0.5: margin 0.05 < 0.1005 -> false
    BeliefSample s1;
    s1.mean = Eigen::VectorXd(2);
    s1.mean << 2.95, 0.0;
    s1.cov = 0.0101 * Eigen::MatrixXd::Identity(2, 2);
    BeliefPath path2;
    path2.step = Rational(1, 100);
    path2.samples = {s1, s1};
    CHECK_FALSE(risitl_satisfies(path2, Formula::mk_atom(0), t, Rational(0)));

    // mu & !mu is false on any trajectory
    auto contradiction = Formula::mk_and(Formula::mk_atom(0), Formula::mk_not(Formula::mk_atom(0)));
    CHECK_FALSE(risitl_satisfies(path, contradiction, t, Rational(0)));

    BeliefPath empty;
    empty.step = Rational(1);
    CHECK_THROWS(risitl_satisfies(empty, g, t, Rational(0)));
}

TEST_CASE("monotonicity of the tightened predicate in eta") {
    // fixed trajectory and atom: times where the predicate holds are
    // non-shrinking as eta increases
    Eigen::VectorXd a(2);
    a << -1, 0;
    Eigen::VectorXd mean(2);
    mean << 2.8, 0.0;
    Eigen::MatrixXd P = 0.04 * Eigen::MatrixXd::Identity(2, 2);
    bool prev = false;
    for (double eta : {0.05, 0.1, 0.3, 0.5, 0.9}) {
        bool holds = risitl::tightened_holds(a, 3.0, eta, mean, P);
        if (prev) CHECK(holds);  // once true, stays true as eta grows
        prev = holds;
    }
}
