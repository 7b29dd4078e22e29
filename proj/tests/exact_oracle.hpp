#pragma once

#include "vgs/box.hpp"
#include "vgs/network.hpp"
#include "vgs/property.hpp"

namespace vgs::testing {

/// Reference decision procedure for the verifier, written independently:
/// enumerates relu sign patterns one unit at a time in exact rational
/// arithmetic, pruning with Fourier-Motzkin feasibility, and applies the
/// same closed relaxation of strict rows (slack >= strict_slack). Exact and
/// deterministic, exponential in the number of relus; only for small nets.
bool exact_sat(const Network& net, const SafetyProperty& property,
               const Box& region, double strict_slack = 1e-9);

}  // namespace vgs::testing
