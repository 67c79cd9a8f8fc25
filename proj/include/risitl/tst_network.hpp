#ifndef RISITL_TST_NETWORK_HPP
#define RISITL_TST_NETWORK_HPP

#include <string>
#include <vector>

#include "risitl/tst.hpp"

namespace risitl {

/// Factored synchronous composition of operator gadgets: the parts run in
/// lockstep, wires (gadget output variables) feed downstream input labels,
/// and acceptance is the conjunction of the per-part conditions. Semantically
/// this IS the synchronous product / input-output composition of the parts;
/// keeping it factored keeps state counts additive instead of multiplicative.
struct TstNetwork {
    std::vector<TimedSignalTransducer> parts;  // topologically ordered, producers first
    int num_props = 0;   // propositions occupy variable ids 0..num_props-1
    int top_output = -1; // the designated output wire

    /// Sum of part clock counts; part i's clocks live at offset(i)..
    int total_clocks() const;
    int clock_offset(int part) const;

    /// Every part output must be a literal-pinned single wire and wiring must
    /// flow forward (a part only reads props and earlier parts' outputs).
    void check_well_formed() const;

    /// Folds the network into one transducer via io_compose (small networks
    /// only; products multiply).
    TimedSignalTransducer materialize() const;

    std::string dump_json(const std::function<std::string(int)>& var_name = nullptr) const;
};

}  // namespace risitl

#endif
