#ifndef RISITL_PLANNER_HPP
#define RISITL_PLANNER_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "risitl/cells.hpp"
#include "risitl/compile.hpp"
#include "risitl/dynamics.hpp"
#include "risitl/transition.hpp"

namespace risitl {

/// The compiled transducer network with every state/transition label
/// resolved against the predicate geometry: elements whose labels admit no
/// feasible cell at the pruning covariance are removed, and each cell
/// carries its closed-form covariance guard for the rectangular case.
struct RegionAutomaton {
    TstNetwork net;
    MitlFormula mitl;
    const PredicateTable* table = nullptr;
    CellComplex cells;
    std::vector<char> cell_alive;                  // feasible at the pruning covariance
    std::vector<std::vector<char>> state_alive;    // per part
    std::vector<std::vector<char>> trans_alive;    // per part
    std::vector<std::vector<double>> cell_guards;  // per cell: max P_dd per axis

    bool initial_pruned = false;  // every initial option of some part died
    int removed_states = 0;
    int removed_transitions = 0;
};

enum class PruneMode { ZeroCovariance, MaxTightening };

/// O1/O2 against the cell geometry at a fixed tightening covariance:
/// P = 0 recovers the untightened operations, MaxTightening uses the
/// per-predicate worst case over the covariance box D.
RegionAutomaton prune_automaton(TstNetwork net, const MitlFormula& mf,
                                const PredicateTable& table, CellComplex cells,
                                const LinearSystem& sys, PruneMode mode);

/// O3: attaches per-cell covariance nonemptiness thresholds (rectangular
/// closed form; non-axis-aligned rows leave an axis unconstrained).
void annotate_cov_guards(RegionAutomaton& ra);

/// One dwell of a candidate: stay in `cell` for `dwell`, then cross.
struct SequenceStep {
    int cell = -1;
    Rational t_start;
    Rational dwell;
};

struct TimedSequence {
    std::vector<SequenceStep> steps;
    int lasso_prefix = -1;   // step index where the cycle begins; -1 = finite
    Rational cycle_period;
    std::string note;
};

struct PlannerParams {
    Rational dt = Rational(1, 100);  // delta T (dwells snap to this grid)
    int max_len = 64;                // step cap per candidate
    long budget = 400000;            // search-node budget
    long omega = 1;                  // unroll count for lasso execution
    int max_candidates = 8;
    Rational stabilize_dwell = Rational(1);  // trailing hold for finite plans
};

/// Guided search for accepting timed sequences: dwell targets come from the
/// automaton's clock deadlines (corner-point strategy), intermediate cells
/// from shortest paths in the cell adjacency, and dwell splits distribute
/// the leg duration evenly on the dt-grid with the remainder pushed late.
/// Sequences are reported through the sink in discovery order (shorter
/// first); returning false stops the enumeration. The verdict is
/// heuristic: exhaustion never claims unsatisfiability.
struct SearchOutcome {
    int candidates = 0;
    bool budget_exhausted = false;
    std::string message;
};

SearchOutcome find_candidate_sequences(const RegionAutomaton& ra, const LinearSystem& sys,
                                       const Eigen::MatrixXd& K, const Eigen::VectorXd& x0,
                                       const Eigen::MatrixXd& P0, const PlannerParams& params,
                                       const std::function<bool(const TimedSequence&)>& sink);

/// One executed dwell segment of a plan.
struct PlanSegment {
    int cell = -1;
    double t_start = 0.0;
    double tau = 0.0;
    Eigen::MatrixXd k;  // m x N feedforward samples
    std::vector<Eigen::VectorXd> mean_path;
    std::vector<Eigen::MatrixXd> cov_path;
    ContinuousCheck certificate;
};

struct TransitionPlan {
    std::vector<PlanSegment> segments;
    int lasso_prefix_segments = -1;
    int lasso_cycle_segments = 0;
    long omega = 1;
    double cost = 0.0;
    bool lasso_closure_ok = false;  // belief state matches across the cycle
};

struct ExecuteOutcome {
    bool ok = false;
    int failed_step = -1;
    std::string message;
    Eigen::VectorXd infeasibility_certificate;
    TransitionPlan plan;
};

/// Algorithm-1 execution: solves one timed-transition QP per step with
/// S1 = the dwell cell and S2 = the next cell at the crossing instant,
/// chaining belief states; lasso cycles are unrolled omega times and a
/// stabilization hold is appended. Fails with the step index and the QP
/// infeasibility certificate.
ExecuteOutcome execute_sequence(const RegionAutomaton& ra, const TimedSequence& seq,
                                const LinearSystem& sys, const Eigen::MatrixXd& K,
                                const Eigen::VectorXd& x0, const Eigen::MatrixXd& P0,
                                const PlannerParams& params, double speed_bound_M);

}  // namespace risitl

#endif
