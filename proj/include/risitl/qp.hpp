#ifndef RISITL_QP_HPP
#define RISITL_QP_HPP

#include <Eigen/Dense>

#include <string>

namespace risitl {

/// Dense convex QP: minimize 1/2 x^T H x + g^T x  subject to  C x + d >= 0.
struct QpProblem {
    Eigen::MatrixXd H;  // symmetric positive definite
    Eigen::VectorXd g;
    Eigen::MatrixXd C;  // one inequality per row
    Eigen::VectorXd d;

    int dim() const { return static_cast<int>(H.rows()); }
    int num_ineq() const { return static_cast<int>(C.rows()); }
};

enum class QpStatus { Optimal, Infeasible, IterationLimit };

struct QpResult {
    QpStatus status = QpStatus::IterationLimit;
    Eigen::VectorXd x;
    Eigen::VectorXd lambda;  // inequality multipliers (>= 0)
    double cost = 0.0;
    int iterations = 0;
    double kkt_stationarity = 0.0;
    double kkt_primal = 0.0;
    double kkt_slackness = 0.0;
    Eigen::VectorXd farkas_ray;  // infeasibility certificate when Infeasible
    std::string message;
};

/// Goldfarb-Idnani dual active-set method. Exact-ish KKT at termination;
/// infeasibility is certified through the phase-1 LP.
QpResult solve_qp_active_set(const QpProblem& qp, double tol = 1e-9);

/// Operator-splitting (ADMM) solver for larger instances; tolerance 1e-6.
QpResult solve_qp_admm(const QpProblem& qp, double tol = 1e-6, int max_iter = 100000);

/// Dense active set up to `dense_limit` decision variables, ADMM beyond.
QpResult solve_qp(const QpProblem& qp, int dense_limit = 500);

/// Fills the KKT residual fields of an Optimal result in place.
void fill_kkt_residuals(const QpProblem& qp, QpResult& r);

}  // namespace risitl

#endif
