#pragma once

#include <string>
#include <vector>

#include "ductmc/types.hpp"

namespace ductmc {

enum class IssueCode {
  InvalidGeometry,
  InvalidFlow,
  InvalidWall,
  InvalidValve,
  InvalidSpecies,
  BadPlacement,
  StepTooCoarse,
  InvalidRun,
};

const char* to_string(IssueCode code);

struct ValidationIssue {
  IssueCode code;
  std::string field_path;
  std::string message;
};

// Returns one entry per violated invariant; empty means the scenario is
// runnable as-is.
std::vector<ValidationIssue> validate_scenario(const SimulationScenario& scenario);

// Throws Error("InvalidScenario", ...) listing every violation.
void require_valid(const SimulationScenario& scenario);

}  // namespace ductmc
