#pragma once

#include <string>
#include <vector>

#include "loadcons/solver.hpp"

namespace loadcons::baseline {

// Every load on its direct path with its own trailer.
solver::Plan plan_tl(const solver::Instance& instance);

// One greedy decision: `hub_load` empty means the load went direct.
struct NnchDecision {
  std::string load;
  std::string hub_load;
};

struct NnchResult {
  solver::Plan plan;
  std::vector<NnchDecision> decisions;  // in processing order
};

// Nearest-neighbour pairing. Loads are taken by departure (ties: id); each
// takes the consolidation path with the shortest detour whose pair fits in the
// larger of the two trailers. A paired or processed load leaves the pool, both
// as a rider and as a hub. The larger trailer of a pair survives (ties: the
// hub load's).
NnchResult run_nnch(const solver::Instance& instance);
solver::Plan plan_nnch(const solver::Instance& instance);

}  // namespace loadcons::baseline
