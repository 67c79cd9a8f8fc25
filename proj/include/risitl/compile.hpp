#ifndef RISITL_COMPILE_HPP
#define RISITL_COMPILE_HPP

#include "risitl/formula.hpp"
#include "risitl/tst.hpp"
#include "risitl/tst_network.hpp"

namespace risitl {

/// Compiles a normalized MITL formula (core fragment plus Periodic) into a
/// factored network of operator gadgets over proposition variables
/// 0 .. num_props-1. The network denotes the synchronous input-output
/// composition of its parts; Boolean structure folds into gadget labels.
///
/// Supported until intervals after normalization: (0,b), [0,b], (0,inf),
/// [0,inf) for arbitrary arguments, and [a,b] with a > 0 when the left
/// argument is True (the eventually/always cases, realized as a pure delay
/// of the closed bounded-eventually gadget). Other shapes are reported.
TstNetwork compile_mitl_network(const MitlFormula& mf);

/// Materialized single-transducer form (folds the network through
/// io_compose); intended for small formulas, dumps and tests.
TimedSignalTransducer compile_mitl(const MitlFormula& mf);

/// Variable name helper for dumps: propositions keep their predicate names,
/// wires print as w<i>.
std::function<std::string(int)> var_namer(const MitlFormula& mf, const PredicateTable* table);

}  // namespace risitl

#endif
