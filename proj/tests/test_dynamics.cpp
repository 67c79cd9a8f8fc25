#include "doctest.h"
#include "risitl/dynamics.hpp"

using namespace risitl;

namespace {

LinearSystem paper_system() {
    // A = diag(0.07, 0.1), B = I, Sigma = 0.1 I
    LinearSystem s;
    s.A = Eigen::Vector2d(0.07, 0.1).asDiagonal();
    s.B = Eigen::MatrixXd::Identity(2, 2);
    s.Sigma = 0.1 * Eigen::MatrixXd::Identity(2, 2);
    s.mean_box.lo = Eigen::VectorXd::Constant(2, 0.0);
    s.mean_box.hi = Eigen::VectorXd::Constant(2, 10.0);
    s.k_min = Eigen::VectorXd::Constant(2, -30.0);
    s.k_max = Eigen::VectorXd::Constant(2, 30.0);
    s.D = Eigen::MatrixXd::Constant(2, 2, 0.25);
    return s;
}

LinearSystem integrator_system() {
    // single integrator: A = 0, B = I
    LinearSystem s;
    s.A = Eigen::MatrixXd::Zero(2, 2);
    s.B = Eigen::MatrixXd::Identity(2, 2);
    s.Sigma = 0.1 * Eigen::MatrixXd::Identity(2, 2);
    s.mean_box.lo = Eigen::VectorXd::Constant(2, -10.0);
    s.mean_box.hi = Eigen::VectorXd::Constant(2, 10.0);
    s.k_min = Eigen::VectorXd::Constant(2, -30.0);
    s.k_max = Eigen::VectorXd::Constant(2, 30.0);
    s.D = Eigen::MatrixXd::Constant(2, 2, 0.05);
    return s;
}

Eigen::MatrixXd diag2(double a, double b) {
    return Eigen::Vector2d(a, b).asDiagonal();
}

}  // namespace

TEST_CASE("expm basics") {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(3, 3);
    CHECK((expm(Z) - Eigen::MatrixXd::Identity(3, 3)).norm() == doctest::Approx(0.0).epsilon(1e-14));

    Eigen::MatrixXd A = -std::log(2.0) * Eigen::MatrixXd::Identity(2, 2);
    CHECK((expm(A) - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);

    // nilpotent block: exp([[0,1],[0,0]]) = [[1,1],[0,1]]
    Eigen::MatrixXd N(2, 2);
    N << 0, 1, 0, 0;
    Eigen::MatrixXd E = expm(N);
    CHECK(E(0, 1) == doctest::Approx(1.0));
    CHECK(E(0, 0) == doctest::Approx(1.0));

    // agreement with a large-norm case via scaling/squaring
    Eigen::MatrixXd big = 40.0 * N - 3.0 * Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd Eb = expm(big);
    CHECK(Eb(0, 0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-10));
    CHECK(Eb(0, 1) == doctest::Approx(40.0 * std::exp(-3.0)).epsilon(1e-10));
}

TEST_CASE("check_gain on the worked systems") {
    auto sys = paper_system();
    Eigen::MatrixXd K = diag2(-0.9, -0.5);
    auto r = check_gain(sys, K, 1e6);
    CHECK(r.hurwitz);
    CHECK(r.max_real_eig == doctest::Approx(-0.4));
    CHECK(r.ok);

    auto r0 = check_gain(sys, Eigen::MatrixXd::Zero(2, 2), 1e6);
    CHECK_FALSE(r0.hurwitz);

    auto integ = integrator_system();
    auto r2 = check_gain(integ, diag2(-5, -5), 1e6);
    CHECK(r2.hurwitz);
}

TEST_CASE("finite-time covariance matches the worked value") {
    auto sys = integrator_system();
    Eigen::MatrixXd K = diag2(-5, -5);
    Eigen::MatrixXd P2 = propagate_covariance(sys, K, Eigen::MatrixXd::Zero(2, 2), 2.0);
    CHECK(std::abs(P2(0, 0) - 0.0101) < 2e-4);
    CHECK(std::abs(P2(1, 1) - 0.0101) < 2e-4);
    CHECK(std::abs(P2(0, 1)) < 1e-12);

    // Sigma = 0, P0 = 0 stays 0; t = 0 returns P0
    auto nz = sys;
    nz.Sigma = Eigen::MatrixXd::Zero(2, 2);
    CHECK(propagate_covariance(nz, K, Eigen::MatrixXd::Zero(2, 2), 3.7).norm() ==
          doctest::Approx(0.0));
    Eigen::MatrixXd P0 = 0.3 * Eigen::MatrixXd::Identity(2, 2);
    CHECK((propagate_covariance(sys, K, P0, 0.0) - P0).norm() == doctest::Approx(0.0));
}

TEST_CASE("steady-state covariance solves the Lyapunov equation") {
    auto sys = paper_system();
    Eigen::MatrixXd K = diag2(-0.9, -0.5);
    Eigen::MatrixXd Pinf = steady_state_covariance(sys, K);
    CHECK(std::abs(Pinf(0, 0) - 0.0602) < 1e-3);
    CHECK(std::abs(Pinf(1, 1) - 0.125) < 1e-3);

    auto integ = integrator_system();
    Eigen::MatrixXd Pi = steady_state_covariance(integ, diag2(-5, -5));
    CHECK(Pi(0, 0) == doctest::Approx(0.01));
    CHECK(Pi(1, 1) == doctest::Approx(0.01));

    auto nz = integ;
    nz.Sigma = Eigen::MatrixXd::Zero(2, 2);
    CHECK(steady_state_covariance(nz, diag2(-5, -5)).norm() == doctest::Approx(0.0));

    CHECK_THROWS(steady_state_covariance(sys, Eigen::MatrixXd::Zero(2, 2)));
}

TEST_CASE("discretization closed form") {
    auto integ = integrator_system();
    // A+BK = -I with dt = ln 2 -> A_d = I/2
    Eigen::MatrixXd K = -Eigen::MatrixXd::Identity(2, 2);
    auto [Ad, Bd] = discretize(integ, K, std::log(2.0));
    CHECK((Ad - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);

    auto [Ad0, Bd0] = discretize(integ, K, 1e-8);
    CHECK((Ad0 - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-6);
    CHECK(Bd0.norm() < 1e-6);

    auto sys = paper_system();
    auto [Adp, Bdp] = discretize(sys, diag2(-0.9, -0.5), 0.01);
    CHECK(Adp(0, 0) == doctest::Approx(std::exp(-0.0083)).epsilon(1e-9));
    CHECK(Adp(1, 1) == doctest::Approx(std::exp(-0.004)).epsilon(1e-9));
}

TEST_CASE("speed bound by vertex enumeration") {
    // A = 0, B = I, K = 0, Sigma = 0, k in [-1,1]^2, P box = {0}: M = sqrt(2)
    LinearSystem s;
    s.A = Eigen::MatrixXd::Zero(2, 2);
    s.B = Eigen::MatrixXd::Identity(2, 2);
    s.Sigma = Eigen::MatrixXd::Zero(2, 2);
    s.mean_box.lo = Eigen::VectorXd::Zero(2);
    s.mean_box.hi = Eigen::VectorXd::Zero(2);
    s.k_min = Eigen::VectorXd::Constant(2, -1.0);
    s.k_max = Eigen::VectorXd::Constant(2, 1.0);
    s.D = Eigen::MatrixXd::Zero(2, 2);
    CHECK(speed_bound(s, Eigen::MatrixXd::Zero(2, 2)) == doctest::Approx(std::sqrt(2.0)));

    s.k_min.setZero();
    s.k_max.setZero();
    CHECK(speed_bound(s, Eigen::MatrixXd::Zero(2, 2)) == doctest::Approx(0.0));
}

TEST_CASE("covariance propagation invariants") {
    auto sys = paper_system();
    Eigen::MatrixXd K = diag2(-0.9, -0.5);
    Eigen::MatrixXd P0 = Eigen::MatrixXd::Zero(2, 2);

    // semigroup
    Eigen::MatrixXd P_12 = propagate_covariance(sys, K, P0, 1.2);
    Eigen::MatrixXd P_2 = propagate_covariance(sys, K, P_12, 0.8);
    Eigen::MatrixXd P_direct = propagate_covariance(sys, K, P0, 2.0);
    CHECK((P_2 - P_direct).norm() < 1e-9);

    // convergence to the steady state at t = 20/|max real eig|
    Eigen::MatrixXd Pinf = steady_state_covariance(sys, K);
    double t_long = 20.0 / 0.4;
    CHECK((propagate_covariance(sys, K, P0, t_long) - Pinf).norm() < 1e-6);

    // psd along the path
    for (double t : {0.1, 0.5, 1.0, 5.0, 20.0}) {
        Eigen::MatrixXd P = propagate_covariance(sys, K, P0, t);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }

    // finite difference against the covariance ODE right-hand side
    double h = 1e-6, t = 0.7;
    Eigen::MatrixXd Pt = propagate_covariance(sys, K, P0, t);
    Eigen::MatrixXd Pth = propagate_covariance(sys, K, P0, t + h);
    Eigen::MatrixXd Abar = closed_loop(sys, K);
    Eigen::MatrixXd rhs = Abar * Pt + Pt * Abar.transpose() + sys.Sigma;
    CHECK(((Pth - Pt) / h - rhs).norm() < 1e-4);  // O(h) with curvature headroom
}
