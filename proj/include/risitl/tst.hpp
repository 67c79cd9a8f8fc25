#ifndef RISITL_TST_HPP
#define RISITL_TST_HPP

#include <string>
#include <vector>

#include "risitl/boolexpr.hpp"
#include "risitl/rational.hpp"

namespace risitl {

/// One clock comparison c_o rel bound. Strict comparisons are needed to
/// separate open-interval behavior exactly (e.g. an input edge before vs at
/// a deadline), so the relation set extends the two closed forms.
struct ClockAtom {
    enum class Rel { LE, GE, LT, GT };
    int clock = 0;
    Rel rel = Rel::LE;
    Rational bound;

    bool eval(const std::vector<Rational>& clocks) const;
    std::string str() const;
};

/// Clock constraint in disjunctive normal form: a disjunction of
/// conjunctions of atoms. An empty disjunct list is `false`; a single empty
/// conjunction is `true`. State invariants stay purely conjunctive.
struct ClockConstraint {
    std::vector<std::vector<ClockAtom>> disjuncts{{}};

    static ClockConstraint always() { return ClockConstraint{{{}}}; }
    static ClockConstraint of(ClockAtom a) { return ClockConstraint{{{a}}}; }
    static ClockConstraint of(std::vector<ClockAtom> conj) { return ClockConstraint{{std::move(conj)}}; }

    bool is_true() const { return disjuncts.size() == 1 && disjuncts[0].empty(); }
    bool is_conjunctive() const { return disjuncts.size() == 1; }
    ClockConstraint conjoin(const ClockConstraint& o) const;
    ClockConstraint shifted(int clock_offset) const;
    bool eval(const std::vector<Rational>& clocks) const;
    /// True when no disjunct imposes an upper bound on any clock.
    bool upper_unbounded() const;
    std::string str() const;
};

struct TstState {
    std::string name;
    ClockConstraint invariant = ClockConstraint::always();
    BoolExpr in_label;   // lambda(s)
    BoolExpr out_label;  // gamma(s)
};

/// Transition (s, g, r, s'); src == kInitial marks transitions from the
/// initial pseudo-state s0 (runs begin with one of these at time 0).
struct TstTransition {
    static constexpr int kInitial = -1;
    int src = kInitial;
    int dst = 0;
    ClockConstraint guard = ClockConstraint::always();
    std::vector<int> resets;  // clock indices reset to 0
    BoolExpr in_label;   // lambda(delta)
    BoolExpr out_label;  // gamma(delta)
};

/// One generalized-Buchi member: the included states and transitions.
struct AcceptanceSet {
    std::vector<int> states;
    std::vector<int> transitions;

    bool has_state(int s) const;
    bool has_transition(int t) const;
};

/// Timed signal transducer: timed automaton with input/output labels and a
/// generalized Buchi acceptance family. States are indexed; the initial
/// state is implicit (kInitial) and carries no labels or invariant.
struct TimedSignalTransducer {
    std::vector<TstState> states;
    std::vector<TstTransition> transitions;
    int num_clocks = 0;
    std::vector<int> input_vars;
    std::vector<int> output_vars;
    std::vector<AcceptanceSet> acceptance;

    std::vector<int> initial_transitions() const;
    std::vector<std::vector<int>> transitions_from() const;  // indexed by state
    /// Structural well-formedness: indices in range, resets valid, guards
    /// non-degenerate, acceptance referencing existing elements.
    void check_well_formed() const;
    /// True when state s belongs to every acceptance member.
    bool in_all_acceptance_sets(int s) const;
    std::string dump_json(const std::function<std::string(int)>& var_name = nullptr) const;
};

// --- Operator gadgets -------------------------------------------------------

/// Operator tags accepted by gadget_tst.
enum class GadgetOp {
    Not,
    And,
    UntilUnbounded,
    EventuallyBounded,        // F over (0,b): open at both ends
    EventuallyBoundedClosed,  // F over [0,b]
    EventuallyUnbounded,      // F over (0, inf)
    ConstTrue,
    Delay,                    // output leads the input by a fixed shift
    PeriodicCheck             // input must be true at start + k*period
};

struct GadgetParams {
    std::vector<BoolExpr> inputs;  // input expressions (wires or formulas over props)
    int output_var = 0;
    Rational bound;        // b for bounded eventually, shift for Delay, period for PeriodicCheck
    Rational start;        // PeriodicCheck activation time
    int pending_slots = 1; // Delay: clock-pool size
    // Delay: known minimum true-dwell of the input (0 = unconstrained). True
    // components at least this long force a matching spacing after every
    // pending rise or isolated-point event, which prunes the queue patterns.
    Rational min_input_dwell;
};

/// Builds the transducer for one operator. Gadget internals are free design;
/// their behavior is pinned by the oracle-equivalence harness.
TimedSignalTransducer gadget_tst(GadgetOp op, const GadgetParams& params);

// --- Composition -------------------------------------------------------------

/// Synchronous product per the standard definition: state set S1 x S2 with
/// simultaneous, left-sided and right-sided transitions, conjoined labels,
/// and the two-member lifted acceptance family. `reachable_only` keeps just
/// the part reachable from the initial pairs.
TimedSignalTransducer synchronous_product(const TimedSignalTransducer& t1,
                                          const TimedSignalTransducer& t2,
                                          bool reachable_only = false);

/// Input-output composition: the producer's single output feeds the matching
/// consumer input; pairs are restricted to output/input-consistent ones and
/// the wire disappears from the interface.
TimedSignalTransducer io_compose(const TimedSignalTransducer& producer,
                                 const TimedSignalTransducer& consumer,
                                 bool reachable_only = false);

}  // namespace risitl

#endif
