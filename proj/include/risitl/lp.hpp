#ifndef RISITL_LP_HPP
#define RISITL_LP_HPP

#include <Eigen/Dense>

#include <optional>

namespace risitl {

/// Outcome of a phase-1 feasibility solve for { x : G x <= h }.
struct FeasibilityResult {
    bool feasible = false;
    Eigen::VectorXd point;       // a feasible point when feasible
    Eigen::VectorXd farkas_ray;  // y >= 0 with y^T G = 0, y^T h < 0 when infeasible
};

/// Dense phase-1 simplex over free variables with Bland's rule.
/// Problem sizes here are tiny; robustness beats speed.
FeasibilityResult lp_phase1(const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                            double tol = 1e-9);

/// Minimizes c^T x over { G x <= h } for free x. Returns nullopt when the
/// constraint set is empty or the objective is unbounded below.
std::optional<Eigen::VectorXd> lp_minimize(const Eigen::VectorXd& c, const Eigen::MatrixXd& G,
                                           const Eigen::VectorXd& h, double tol = 1e-9);

}  // namespace risitl

#endif
