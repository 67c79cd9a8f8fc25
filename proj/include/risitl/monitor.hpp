#ifndef RISITL_MONITOR_HPP
#define RISITL_MONITOR_HPP

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "risitl/formula.hpp"
#include "risitl/interval_set.hpp"

namespace risitl {

/// Right-continuous piecewise-constant Boolean signal per proposition.
/// Breakpoint lists are strictly increasing in time and start at 0. Beyond
/// `horizon` the last segment is treated as held forever.
struct BooleanSignal {
    int num_props = 0;
    std::vector<std::vector<std::pair<Rational, bool>>> breakpoints;
    Rational horizon;

    static BooleanSignal constant(int num_props, const std::vector<bool>& values,
                                  const Rational& horizon);
    void set_segments(int prop, std::vector<std::pair<Rational, bool>> bps);
    bool value_at(int prop, const Rational& t) const;
    /// Exact satisfaction set of proposition `prop` over [0, inf) (held).
    IntervalSet atom_sat(int prop) const;
};

/// Exact satisfaction set {t : (d,t) |= f} computed recursively over
/// interval unions. Works on the full syntax (derived operators included)
/// so it can arbitrate normalization. Periodic nodes need finite repetition
/// counts.
IntervalSet mitl_sat_set(const BooleanSignal& sig, const Formula::Ptr& f);

bool mitl_satisfies(const BooleanSignal& sig, const Formula::Ptr& f, const Rational& t);

/// Sampled belief-state path: sample i sits at time i*step.
struct BeliefSample {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

struct BeliefPath {
    Rational step;
    std::vector<BeliefSample> samples;
};

/// Booleanizes every predicate along the path with the DR-tightened test
/// a^T mean + b - H(eta) * sqrt(a^T P a) >= 0, holding each sample until the
/// next (piecewise-constant), and returns the proposition signal indexed by
/// predicate position in the table.
BooleanSignal booleanize(const BeliefPath& path, const PredicateTable& table);

/// RiSITL satisfaction over a sampled belief path at time t: booleanize,
/// then evaluate the (predicate-indexed) formula with the MITL semantics.
bool risitl_satisfies(const BeliefPath& path, const Formula::Ptr& f, const PredicateTable& table,
                      const Rational& t);

}  // namespace risitl

#endif
