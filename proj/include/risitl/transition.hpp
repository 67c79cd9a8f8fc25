#ifndef RISITL_TRANSITION_HPP
#define RISITL_TRANSITION_HPP

#include <optional>
#include <string>
#include <vector>

#include "risitl/dynamics.hpp"
#include "risitl/qp.hpp"
#include "risitl/risk.hpp"

namespace risitl {

/// One timed transition: dwell in S1 for duration T (sampled every dt),
/// landing in S2 exactly at T, under fixed feedback K and ZOH feedforward.
struct TimedTransitionProblem {
    const LinearSystem* sys = nullptr;
    Eigen::MatrixXd K;
    TightenedRegion S1;
    TightenedRegion S2;
    double T = 1.0;
    double dt = 0.01;
    double speed = 0.0;      // the augmented speed bound M
    Eigen::VectorXd x0;
    Eigen::MatrixXd P0;
    Eigen::MatrixXd R;       // psd stage cost weight (m x m)
    int n_relax = 3;         // Remark-5 endpoint relaxation width

    int steps() const { return static_cast<int>(std::lround(T / dt)); }
};

struct TransitionSolution {
    Eigen::MatrixXd k;                        // m x N feedforward samples
    std::vector<Eigen::VectorXd> mean_path;   // N+1 sampled means
    std::vector<Eigen::MatrixXd> cov_path;    // N+1 sampled covariances
    double cost = 0.0;
    QpResult diagnostics;
};

struct TransitionOutcome {
    bool feasible = false;
    bool iteration_limit = false;
    TransitionSolution solution;              // valid when feasible
    Eigen::VectorXd infeasibility_certificate;
    std::string message;
};

/// Covariance samples P(i*dt) for i = 0..N under the closed loop.
std::vector<Eigen::MatrixXd> covariance_samples(const LinearSystem& sys, const Eigen::MatrixXd& K,
                                                const Eigen::MatrixXd& P0, double dt, int N);

/// Condensed QP of the sampled problem: decision variables are the stacked
/// feedforward samples k[0..N-1]; means are eliminated through the exact
/// ZOH recursion. Constraints: the input box at every sample, the
/// (M*dt)-inner-offset S1 at interior samples, the un-offset S1 at the
/// relaxed head/tail samples, and S2 at the final time.
QpProblem build_qp(const TimedTransitionProblem& prob);

/// Builds, solves (active set with first-order fallback), reconstructs the
/// sampled paths, and retries once with the Remark-5 relaxation when the
/// fully tightened problem is infeasible and n_relax was 0.
TransitionOutcome solve_transition(const TimedTransitionProblem& prob);

struct ContinuousCheck {
    bool ok = false;
    double worst_margin_s1 = 0.0;  // min over (0,T) of the S1 margin
    double worst_margin_s2 = 0.0;  // S2 margin at T
    double violation_time = -1.0;
    std::string message;
};

/// Simulates the closed-loop mean/covariance ODE at step dt/oversample under
/// the solved ZOH feedforward and checks the original (DR-tightened,
/// un-offset) constraints on [0,T) plus S2 at T.
ContinuousCheck verify_continuous(const TimedTransitionProblem& prob,
                                  const TransitionSolution& sol, int oversample = 10);

/// Sparse-triplet JSON of the QP for external cross-checking.
std::string dump_qp_json(const QpProblem& qp);

}  // namespace risitl

#endif
