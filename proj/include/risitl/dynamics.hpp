#ifndef RISITL_DYNAMICS_HPP
#define RISITL_DYNAMICS_HPP

#include <Eigen/Dense>

#include <string>
#include <utility>

#include "risitl/risk.hpp"

namespace risitl {

/// dX = (A X + B u) dt + dW with moment-bounded noise of covariance Sigma
/// per unit time, plus the operating envelope used for the speed bound.
struct LinearSystem {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd Sigma;   // n x n psd
    MeanBox mean_box;        // physical bounds on the mean state
    Eigen::VectorXd k_min;   // feedforward bounds
    Eigen::VectorXd k_max;
    Eigen::MatrixXd D;       // componentwise bound on vec(P), given as n x n

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
};

/// Scaling-and-squaring matrix exponential with Pade order 13.
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);

/// Closed-loop matrix A + B K.
Eigen::MatrixXd closed_loop(const LinearSystem& sys, const Eigen::MatrixXd& K);

/// vec(P) generator I (x) Abar + Abar (x) I.
Eigen::MatrixXd covariance_generator(const Eigen::MatrixXd& Abar);

bool is_hurwitz(const Eigen::MatrixXd& M, double margin = 0.0);

struct GainCheck {
    bool ok = false;
    bool hurwitz = false;
    bool covariance_within_D = false;
    bool speed_within_limit = false;
    double max_real_eig = 0.0;
    double speed = 0.0;
    std::string detail;
};

/// The three gain requirements: A+BK Hurwitz, steady-state covariance within
/// D, and the augmented speed bound within m_max.
GainCheck check_gain(const LinearSystem& sys, const Eigen::MatrixXd& K, double m_max);

/// P(t) from P(0) = P0 under constant K: solution of the vectorized linear
/// ODE via an augmented matrix exponential; the result is symmetrized.
Eigen::MatrixXd propagate_covariance(const LinearSystem& sys, const Eigen::MatrixXd& K,
                                     const Eigen::MatrixXd& P0, double t);

/// Unique psd solution of (A+BK) P + P (A+BK)^T + Sigma = 0.
Eigen::MatrixXd steady_state_covariance(const LinearSystem& sys, const Eigen::MatrixXd& K);

/// Exact ZOH discretization of the closed-loop mean dynamics:
/// A_d = exp(Abar dt), B_d = \int_0^dt exp(Abar s) ds B.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> discretize(const LinearSystem& sys,
                                                       const Eigen::MatrixXd& K, double dt);

/// Max of || A(K) X + B U || over the operating boxes: the mean box times
/// 0 <= vec(P) <= vec(D), and [k_min,k_max] x {vec(Sigma)}. Convex in the
/// state, so vertex enumeration is exact for n <= 3; an interval bound is
/// used beyond that.
double speed_bound(const LinearSystem& sys, const Eigen::MatrixXd& K);

}  // namespace risitl

#endif
