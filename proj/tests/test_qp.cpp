#include "doctest.h"
#include "risitl/qp.hpp"

#include <random>

using namespace risitl;

namespace {

QpProblem box_problem(double lo, double hi) {
    // minimize k^2 over [lo, hi]
    QpProblem qp;
    qp.H = 2.0 * Eigen::MatrixXd::Identity(1, 1);
    qp.g = Eigen::VectorXd::Zero(1);
    qp.C = Eigen::MatrixXd(2, 1);
    qp.C << 1, -1;
    qp.d = Eigen::VectorXd(2);
    qp.d << -lo, hi;
    return qp;
}

}  // namespace

TEST_CASE("clipped unconstrained optimum") {
    auto qp = box_problem(1.0, 2.0);
    auto r = solve_qp_active_set(qp);
    REQUIRE(r.status == QpStatus::Optimal);
    CHECK(r.x(0) == doctest::Approx(1.0));
    CHECK(r.cost == doctest::Approx(1.0));
    CHECK(r.kkt_stationarity < 1e-7);
    CHECK(r.kkt_slackness < 1e-7);

    auto inside = box_problem(-2.0, 2.0);
    auto r2 = solve_qp_active_set(inside);
    REQUIRE(r2.status == QpStatus::Optimal);
    CHECK(r2.x(0) == doctest::Approx(0.0));
}

TEST_CASE("infeasible problem yields a Farkas certificate") {
    QpProblem qp;
    qp.H = Eigen::MatrixXd::Identity(1, 1);
    qp.g = Eigen::VectorXd::Zero(1);
    qp.C = Eigen::MatrixXd(2, 1);
    qp.C << 1, -1;
    qp.d = Eigen::VectorXd(2);
    qp.d << -2.0, 1.0;  // x >= 2 and x <= 1
    auto r = solve_qp_active_set(qp);
    REQUIRE(r.status == QpStatus::Infeasible);
    REQUIRE(r.farkas_ray.size() == 2);
    CHECK(r.farkas_ray.minCoeff() >= -1e-9);
    // y^T(-C) = 0 and y^T d < 0 certify emptiness
    CHECK(std::abs((r.farkas_ray.transpose() * -qp.C)(0)) < 1e-7);
    CHECK(r.farkas_ray.dot(qp.d) < 0);
}

TEST_CASE("random QPs match a projected-gradient reference") {
    std::mt19937 rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + trial % 4;
        Eigen::MatrixXd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
        QpProblem qp;
        qp.H = A.transpose() * A + Eigen::MatrixXd::Identity(n, n);
        qp.g = Eigen::VectorXd::NullaryExpr(n, [&](int) { return gauss(rng); });
        // box [-1, 1]^n plus a random halfspace through a feasible point
        qp.C = Eigen::MatrixXd(2 * n + 1, n);
        qp.d = Eigen::VectorXd(2 * n + 1);
        for (int i = 0; i < n; ++i) {
            qp.C.row(2 * i).setZero();
            qp.C(2 * i, i) = 1.0;
            qp.d(2 * i) = 1.0;
            qp.C.row(2 * i + 1).setZero();
            qp.C(2 * i + 1, i) = -1.0;
            qp.d(2 * i + 1) = 1.0;
        }
        Eigen::VectorXd a = Eigen::VectorXd::NullaryExpr(n, [&](int) { return gauss(rng); });
        qp.C.row(2 * n) = a.transpose();
        qp.d(2 * n) = 0.5;  // keeps the origin feasible
        auto r = solve_qp_active_set(qp);
        REQUIRE(r.status == QpStatus::Optimal);
        CHECK(r.kkt_stationarity < 1e-6);
        CHECK(r.kkt_primal < 1e-7);
        CHECK(r.kkt_slackness < 1e-7);

        // projected gradient reference (slow but independent)
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        double step = 1.0 / (qp.H.norm() + 1.0);
        for (int it = 0; it < 20000; ++it) {
            x -= step * (qp.H * x + qp.g);
            // crude projection: clamp box, then backtrack along the halfspace
            for (int i = 0; i < n; ++i) x(i) = std::min(1.0, std::max(-1.0, x(i)));
            double viol = a.dot(x) + 0.5;
            if (viol < 0) x -= viol * a / a.squaredNorm();
        }
        double ref_cost = 0.5 * x.dot(qp.H * x) + qp.g.dot(x);
        CHECK(r.cost <= ref_cost + 1e-4);

        // ADMM agrees with the active set
        auto r2 = solve_qp_admm(qp, 1e-8);
        REQUIRE(r2.status == QpStatus::Optimal);
        CHECK(r2.cost == doctest::Approx(r.cost).epsilon(1e-4));
    }
}
