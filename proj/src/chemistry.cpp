#include "ductmc/chemistry.hpp"

#include <cmath>

#include "ductmc/error.hpp"

namespace ductmc {

bool survives(double degradation_rate_per_s, double dt_s, RngStream& rng) {
  if (degradation_rate_per_s < 0.0) throw Error("InvalidSpecies", "degradation rate must be non-negative");
  if (degradation_rate_per_s == 0.0) return true;
  return rng.uniform() < std::exp(-degradation_rate_per_s * dt_s);
}

}  // namespace ductmc
