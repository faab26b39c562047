#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "loadcons/pathgen.hpp"

namespace loadcons::solver {

// Which last-leg origins carry a capacity constraint: only mined hubs, or
// every node some path leaves from (the default; it rules out a direct load
// travelling with its trailer switched off).
enum class CapacityScope { hubs, all };

// Accepts "paper" for the mined-hubs-only scope and "all".
CapacityScope parse_capacity_scope(const std::string& name);
std::string to_string(CapacityScope s);

struct InstanceLoad {
  std::string id;
  double volume = 0.0;    // q
  double capacity = 0.0;  // Q
  std::int64_t departure = 0;
};

struct Instance {
  std::vector<InstanceLoad> loads;                // sorted by id
  std::vector<std::vector<pathgen::Path>> paths;  // per load; [0] is the direct path
  std::vector<Node> nodes;                        // distinct last-leg origins, sorted
  std::vector<std::vector<std::size_t>> oll;      // per load and path: index into nodes
  std::vector<char> constrained;                  // per node

  std::size_t path_count() const;
};

// Throws ContractViolation unless every load has exactly one direct path.
// `hubs` only matters for CapacityScope::hubs.
Instance build_instance(std::vector<InstanceLoad> loads, std::vector<std::vector<pathgen::Path>> paths,
                        CapacityScope scope = CapacityScope::all, const std::set<Node>& hubs = {});

// Loads missing from `paths` get their direct path only.
Instance make_instance(const std::vector<Load>& loads, const pathgen::PathSet& paths,
                       const geo::DistanceFn& distance, const pathgen::CostModel& costs,
                       CapacityScope scope = CapacityScope::all, const std::set<Node>& hubs = {});

// One (load, path) decision. `routed` is xi, `active` is nu.
struct Assignment {
  std::size_t load = 0;
  std::size_t path = 0;
  bool routed = true;
  bool active = false;
};

struct SolveStats {
  std::uint64_t nodes = 0;
  double wall_ms = 0.0;
  std::size_t components = 0;
};

struct Plan {
  std::vector<Assignment> assignments;  // by load index
  double objective = 0.0;
  bool optimal = false;
  SolveStats stats;

  std::size_t active_trailers() const;
  // Path index chosen for each load (the routed assignment).
  std::vector<std::size_t> choices(std::size_t n_loads) const;
};

// sum c * xi + f * nu over the plan's assignments.
double objective_of(const Instance& instance, const Plan& plan);

// Plan routing every load on `choice` with trailers switched on per `active`.
Plan make_plan(const Instance& instance, const std::vector<std::size_t>& choice,
               const std::vector<char>& active);

// Cheapest trailer subset covering `demand`; ties prefer fewer trailers, then
// the lexicographically smallest set of load indices.
struct Trailer {
  std::size_t load = 0;
  double capacity = 0.0;
  double cost = 0.0;
};

struct Cover {
  bool feasible = false;
  double cost = 0.0;
  std::vector<std::size_t> chosen;  // load indices, ascending
};

Cover best_cover(std::vector<Trailer> trailers, double demand);

struct Budget {
  std::uint64_t max_nodes = 10'000'000;
  double max_seconds = 60.0;
};

// Branch and bound over load -> path choices with trailer activation solved
// exactly per last-leg origin. Loads are split into independent components
// first. Warm starts seed the incumbent; the result is never worse than any
// of them. Ties: fewer active trailers, then lexicographically smallest path
// choice vector.
Plan solve_exact(const Instance& instance, const Budget& budget = {},
                 const std::vector<Plan>& warm_starts = {});

// Exhaustive reference for small instances (at most kBruteforceMaxLoads loads).
inline constexpr std::size_t kBruteforceMaxLoads = 10;
Plan solve_bruteforce(const Instance& instance);

struct PlanViolation {
  std::string constraint;  // "one-path", "path-index", "trailer-without-route", "capacity", "objective"
  std::string detail;
};

std::vector<PlanViolation> verify_plan(const Instance& instance, const Plan& plan);

}  // namespace loadcons::solver
