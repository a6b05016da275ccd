#pragma once

#include "ductmc/rng.hpp"

namespace ductmc {

// First-order degradation: survival over one step has probability
// exp(-rate * dt). rate = 0 must not consume a draw, so disabled chemistry
// and rate zero produce bit-identical runs.
bool survives(double degradation_rate_per_s, double dt_s, RngStream& rng);

}  // namespace ductmc
