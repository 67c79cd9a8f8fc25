#ifndef RISITL_ACCEPTS_HPP
#define RISITL_ACCEPTS_HPP

#include "risitl/dbm.hpp"
#include "risitl/monitor.hpp"
#include "risitl/tst.hpp"
#include "risitl/tst_network.hpp"

namespace risitl {

struct AcceptOptions {
    bool require_output_true = true;  // demand y(0) = true on the first step
    std::size_t node_budget = 2000000;
    std::size_t combo_budget = 200000;  // per-expansion simultaneous-option cap
};

/// Decides whether the (factored) transducer network has an accepting run
/// over the signal (last segment held forever) whose first discrete step
/// emits a true top output. The search walks the breakpoint-aligned run
/// graph with difference-bound-matrix zones over configuration vectors;
/// acceptance at the constant tail is a configuration where every part can
/// dwell forever inside all of its Buchi members. Throws on budget
/// exhaustion (Zeno-suspect gadget or blow-up).
bool network_accepts(const TstNetwork& net, const BooleanSignal& sig,
                     const AcceptOptions& opts = {});

/// Single-machine convenience wrapper.
bool tst_accepts(const TimedSignalTransducer& tst, const BooleanSignal& sig,
                 const AcceptOptions& opts = {});

}  // namespace risitl

#endif
