#include "doctest.h"
#include "risitl/risk.hpp"
#include "risitl/lp.hpp"

#include <random>

using namespace risitl;

TEST_CASE("tightening factor closed form") {
    CHECK(tightening_factor(0.5) == doctest::Approx(1.0));
    CHECK(tightening_factor(0.1) == doctest::Approx(3.0));
    CHECK(tightening_factor(0.4) == doctest::Approx(1.224745).epsilon(1e-6));
    CHECK_THROWS(tightening_factor(0.0));
    CHECK_THROWS(tightening_factor(1.0));
    CHECK(tightening_factor(0.2) > tightening_factor(0.3));
}

TEST_CASE("tighten_halfspace reproduces the worked offsets") {
    Eigen::VectorXd a(2);
    a << -1, 0;
    Eigen::MatrixXd P = 0.0101 * Eigen::MatrixXd::Identity(2, 2);
    auto [dir, beff] = tighten_halfspace(a, 3.0, 0.5, P);
    CHECK(beff == doctest::Approx(2.899501).epsilon(1e-5));

    auto [dir2, beff2] = tighten_halfspace(a, 4.0, 0.1, P);
    CHECK(beff2 == doctest::Approx(3.698503).epsilon(1e-5));

    auto [dir3, beff3] = tighten_halfspace(a, 5.0, 0.2, Eigen::MatrixXd::Zero(2, 2));
    CHECK(beff3 == doctest::Approx(5.0));

    Eigen::MatrixXd bad(2, 2);
    bad << 1, 0, 0, -1;
    CHECK_THROWS(tighten_halfspace(a, 1.0, 0.5, bad));
}

TEST_CASE("b_eff monotone in P diagonal and eta") {
    Eigen::VectorXd a(2);
    a << 1, 0;
    RegionRow r{a, 2.0, 0.3, +1, -1};
    double prev = 1e9;
    for (double p11 : {0.0, 0.1, 0.5, 1.0}) {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2, 2);
        P(0, 0) = p11;
        double v = r.b_eff(P, 0.0);
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
    Eigen::MatrixXd P = 0.2 * Eigen::MatrixXd::Identity(2, 2);
    double last = -1e9;
    for (double eta : {0.05, 0.2, 0.5, 0.8}) {
        RegionRow rr{a, 2.0, eta, +1, -1};
        double v = rr.b_eff(P, 0.0);
        CHECK(v >= last - 1e-12);
        last = v;
    }
}

TEST_CASE("region feasibility via phase-1 LP") {
    MeanBox box;
    box.lo = Eigen::VectorXd::Constant(1, -10.0);
    box.hi = Eigen::VectorXd::Constant(1, 10.0);
    Eigen::MatrixXd P0 = Eigen::MatrixXd::Zero(1, 1);

    // x <= 3 and x >= 4 with P = 0: empty slab
    TightenedRegion bad;
    Eigen::VectorXd am(1), ap(1);
    am << -1;
    ap << 1;
    bad.add_row({am, 3.0, 0.5, +1, -1});
    bad.add_row({ap, -4.0, 0.5, +1, -1});
    CHECK_FALSE(region_feasible(bad, P0, box));

    TightenedRegion good;
    good.add_row({am, 3.0, 0.5, +1, -1});
    good.add_row({ap, -2.0, 0.5, +1, -1});
    CHECK(region_feasible(good, P0, box));
}

TEST_CASE("rectangle feasibility matches the closed-form threshold") {
    // centered slab of half-width 1 in x with eta = 0.5 on both edges:
    // feasible iff P11 <= ((b1+b3)/2)^2 = 1
    MeanBox box;
    box.lo = Eigen::VectorXd::Constant(2, -100.0);
    box.hi = Eigen::VectorXd::Constant(2, 100.0);
    TightenedRegion slab;
    Eigen::VectorXd left(2), right(2);
    left << 1, 0;   // x >= -1  ->  x + 1 >= 0
    right << -1, 0; // x <= 1   -> -x + 1 >= 0
    slab.add_row({left, 1.0, 0.5, +1, -1});
    slab.add_row({right, 1.0, 0.5, +1, -1});

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2, 2);
    P(0, 0) = 0.81;
    CHECK(region_feasible(slab, P, box));
    P(0, 0) = 1.21;
    CHECK_FALSE(region_feasible(slab, P, box));
}

TEST_CASE("inner offset geometry and composition") {
    Eigen::VectorXd up(1), dn(1);
    up << 1;
    dn << -1;
    TightenedRegion slab;  // 0 <= x <= 1
    slab.add_row({up, 0.0, 0.5, +1, -1});
    slab.add_row({dn, 1.0, 0.5, +1, -1});
    MeanBox box;
    box.lo = Eigen::VectorXd::Constant(1, -5.0);
    box.hi = Eigen::VectorXd::Constant(1, 5.0);
    Eigen::MatrixXd P0 = Eigen::MatrixXd::Zero(1, 1);

    CHECK(region_feasible(slab, P0, box));
    auto off = inner_offset(slab, 0.6);
    CHECK_FALSE(region_feasible(off, P0, box));  // width 1 < 2*0.6

    auto a1 = inner_offset(inner_offset(slab, 0.2), 0.3);
    auto a2 = inner_offset(slab, 0.5);
    CHECK(a1.extra_offset() == doctest::Approx(a2.extra_offset()));

    // identity at eps = 0
    auto same = inner_offset(slab, 0.0);
    CHECK(same.extra_offset() == doctest::Approx(slab.extra_offset()));

    // worked offset: goal edge x <= 2.8995 shifted by 0.5712 -> 2.3283
    Eigen::VectorXd a(2);
    a << -1, 0;
    TightenedRegion goal;
    goal.add_row({a, 3.0, 0.5, +1, -1});
    Eigen::MatrixXd P = 0.0101 * Eigen::MatrixXd::Identity(2, 2);
    auto hs = inner_offset(goal, 0.5712).halfspaces(P);
    // -x >= -b_eff  ->  x <= b_eff = 2.899501 - 0.5712 = 2.328301
    CHECK(-hs[0].second == doctest::Approx(2.328301).epsilon(1e-5));
}

TEST_CASE("max tightening over the covariance box") {
    Eigen::MatrixXd D(2, 2);
    D << 0.1, 0.0, 0.0, 0.125;
    Eigen::VectorXd e1(2), e2(2);
    e1 << 1, 0;
    e2 << 0, 1;
    auto Ps = max_tightening_P({e1, e2}, D);
    CHECK(e1.dot(Ps[0] * e1) == doctest::Approx(0.1));
    CHECK(e2.dot(Ps[1] * e2) == doctest::Approx(0.125));

    auto zero = max_tightening_P({e1}, Eigen::MatrixXd::Zero(2, 2));
    CHECK(zero[0].norm() == doctest::Approx(0.0));

    // general direction: exceeds what the diagonal alone provides and stays
    // within the box and psd
    Eigen::VectorXd diag(2);
    diag << std::sqrt(0.5), std::sqrt(0.5);
    Eigen::MatrixXd Dfull(2, 2);
    Dfull << 0.1, 0.05, 0.05, 0.1;
    auto Pg = max_tightening_P({diag}, Dfull)[0];
    double val = diag.dot(Pg * diag);
    CHECK(val >= 0.1 - 1e-6);          // at least the diagonal part
    CHECK(val <= 0.1 + 0.05 + 1e-6);   // cannot beat the box bound
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Pg);
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
}

TEST_CASE("empirical DR bound holds for every member distribution") {
    // Constraint tight at (mean, P): sampled violation frequency of
    // a^T X + b < 0 stays below eta + 3 sigma-hat for gaussian, scaled
    // student-t(3) and uniform noise sharing (0, P).
    std::mt19937 rng(123);
    const int N = 100000;
    Eigen::VectorXd a(1);
    a << 1.0;
    for (double eta : {0.5, 0.1}) {
        double H = tightening_factor(eta);
        double sigma = 0.3;
        Eigen::MatrixXd P(1, 1);
        P << sigma * sigma;
        // place the mean so the tightened constraint is exactly tight:
        // a x + b - H sigma = 0 with b = 0 -> mean = H sigma
        double mean = H * sigma;

        auto run = [&](auto draw) {
            int viol = 0;
            for (int i = 0; i < N; ++i)
                if (mean + draw() < 0.0) ++viol;
            double rate = static_cast<double>(viol) / N;
            double sehat = std::sqrt(std::max(rate * (1 - rate), 1e-12) / N);
            CHECK(rate <= eta + 3 * sehat);
        };
        std::normal_distribution<double> gauss(0.0, sigma);
        run([&] { return gauss(rng); });
        std::student_t_distribution<double> st(3.0);
        run([&] { return st(rng) * sigma * std::sqrt(1.0 / 3.0); });
        double L = sigma * std::sqrt(3.0);
        std::uniform_real_distribution<double> uni(-L, L);
        run([&] { return uni(rng); });
    }
}

TEST_CASE("lp_minimize on a little box problem") {
    // min x + y over [0,1]^2 shifted: x >= 0.25, y >= -1, x+y <= 2
    Eigen::MatrixXd G(5, 2);
    Eigen::VectorXd h(5);
    G << -1, 0, 0, -1, 1, 0, 0, 1, 1, 1;
    h << -0.25, 1, 1, 1, 2;
    auto x = lp_minimize(Eigen::VectorXd::Constant(2, 1.0), G, h);
    REQUIRE(x.has_value());
    CHECK((*x)(0) == doctest::Approx(0.25));
    CHECK((*x)(1) == doctest::Approx(-1.0));

    // infeasible system yields a Farkas ray
    Eigen::MatrixXd G2(2, 1);
    Eigen::VectorXd h2(2);
    G2 << 1, -1;
    h2 << 1, -2;  // x <= 1 and x >= 2
    auto r = lp_phase1(G2, h2);
    REQUIRE_FALSE(r.feasible);
    CHECK(r.farkas_ray.minCoeff() >= -1e-9);
    CHECK(r.farkas_ray.dot(h2) < -1e-9);
    Eigen::VectorXd combo = G2.transpose() * r.farkas_ray;
    CHECK(std::abs(combo(0)) < 1e-7);
}
