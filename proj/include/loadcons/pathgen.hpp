#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "loadcons/geo.hpp"
#include "loadcons/mining.hpp"
#include "loadcons/model.hpp"

namespace loadcons::pathgen {

enum class PathKind { direct, consolidation };

std::string to_string(PathKind k);

// Direct route (o, d) or consolidation route (o, h, d).
struct Path {
  std::string load_id;
  PathKind kind = PathKind::direct;
  std::optional<Node> hub;
  Node last_leg_origin;       // o for direct, h for consolidation
  double detour_cost = 0.0;   // o -> h, zero for direct
  double last_leg_cost = 0.0; // trailer cost from the last-leg origin to d
  std::string hub_load_id;    // load whose origin is the hub; empty for direct
  double detour_miles = 0.0;
  double last_leg_miles = 0.0;
  double detour_minutes = 0.0;
};

// Per-mile rate by trailer type plus a fixed charge per dispatched leg.
struct CostModel {
  std::map<std::string, double> rates;
  double default_rate = 1.0;
  double fixed_dispatch = 0.0;

  bool knows(const std::string& trailer_type) const {
    return rates.empty() || rates.count(trailer_type) > 0;
  }
};

// rate(trailer_type) * miles + fixed_dispatch; unknown types use default_rate.
double cost(double miles, const std::string& trailer_type, const CostModel& model);

struct PathGenConfig {
  double dwell_minutes = 0.0;
  CostModel costs;
  // Also demand that the load and the hub load co-occur in one mined candidate.
  bool require_comembership = false;
};

// Loads whose abstract point belongs to at least one candidate set.
std::vector<Load> select_lc(const std::vector<Load>& loads,
                            const std::vector<mining::CandidateSet>& candidates);

// Operational feasibility: t_l + travel(o_l, o_h) + dwell <= t_h.
// Throws ContractViolation when destination or due day differ.
bool kappa_op(const Load& load, const Load& hub_load, const geo::TravelFn& travel,
              double dwell_minutes = 0.0);

struct PathSet {
  std::map<std::string, std::vector<Path>> by_load;  // direct path first, then by hub node
  std::vector<std::string> warnings;

  std::size_t consolidation_paths() const;
};

Path direct_path(const Load& load, const geo::DistanceFn& distance, const CostModel& costs);

// Direct path for every load plus one consolidation path per eligible hub
// node. A hub is eligible when it lies in `hubs`, differs from the load's own
// origin node, and some other load in `lc` leaves from it late enough for
// kappa_op; the latest such departure becomes the hub load. `candidates` is
// only consulted for require_comembership.
PathSet generate_paths(const std::vector<Load>& lc, const std::set<Node>& hubs,
                       const std::vector<mining::CandidateSet>& candidates,
                       const geo::TravelFn& travel, const geo::DistanceFn& distance,
                       const PathGenConfig& config);

// Same as generate_paths with every origin node of `loads` acting as a hub and
// no co-membership filter: all time-feasible consolidation routes.
PathSet generate_paths_unfiltered(const std::vector<Load>& loads, const geo::TravelFn& travel,
                                  const geo::DistanceFn& distance, const PathGenConfig& config);

}  // namespace loadcons::pathgen
