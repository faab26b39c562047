#include "loadcons/pathgen.hpp"

#include <algorithm>

namespace loadcons::pathgen {

std::string to_string(PathKind k) { return k == PathKind::direct ? "direct" : "consolidation"; }

double cost(double miles, const std::string& trailer_type, const CostModel& model) {
  if (miles < 0.0) throw ContractViolation("negative leg length");
  const auto it = model.rates.find(trailer_type);
  const double rate = it == model.rates.end() ? model.default_rate : it->second;
  return rate * miles + model.fixed_dispatch;
}

std::size_t PathSet::consolidation_paths() const {
  std::size_t n = 0;
  for (const auto& [id, paths] : by_load) {
    for (const auto& p : paths) n += p.kind == PathKind::consolidation ? 1 : 0;
  }
  return n;
}

std::vector<Load> select_lc(const std::vector<Load>& loads,
                            const std::vector<mining::CandidateSet>& candidates) {
  std::set<mining::AbstractPoint> items;
  for (const auto& c : candidates) items.insert(c.items.begin(), c.items.end());
  std::vector<Load> out;
  for (const auto& l : loads) {
    if (items.count(mining::abstract_load(l))) out.push_back(l);
  }
  return out;
}

bool kappa_op(const Load& load, const Load& hub_load, const geo::TravelFn& travel,
              double dwell_minutes) {
  if (load.destination != hub_load.destination || load.due_day != hub_load.due_day) {
    throw ContractViolation("kappa_op needs loads with equal destination and due day");
  }
  const double arrive = static_cast<double>(load.departure) +
                        travel(load.origin.terminal, hub_load.origin.terminal) + dwell_minutes;
  return arrive <= static_cast<double>(hub_load.departure);
}

Path direct_path(const Load& load, const geo::DistanceFn& distance, const CostModel& costs) {
  Path p;
  p.load_id = load.id;
  p.kind = PathKind::direct;
  p.last_leg_origin = load.origin;
  p.last_leg_miles = distance(load.origin.terminal, load.destination.terminal);
  p.last_leg_cost = cost(p.last_leg_miles, load.trailer_type, costs);
  return p;
}

namespace {

PathSet generate(const std::vector<Load>& loads, const std::set<Node>* hub_filter,
                 const std::vector<mining::CandidateSet>* comembership, const geo::TravelFn& travel,
                 const geo::DistanceFn& distance, const PathGenConfig& config) {
  std::vector<const Load*> sorted;
  for (const auto& l : loads) sorted.push_back(&l);
  std::sort(sorted.begin(), sorted.end(), [](const Load* a, const Load* b) { return a->id < b->id; });

  std::map<Node, std::vector<const Load*>> by_origin;
  for (const Load* l : sorted) by_origin[l->origin].push_back(l);

  // Candidate indices per item, ascending, so co-membership is a sorted intersection.
  std::map<mining::AbstractPoint, std::vector<std::size_t>> member_of;
  if (comembership != nullptr) {
    for (std::size_t k = 0; k < comembership->size(); ++k) {
      for (const auto& item : (*comembership)[k].items) member_of[item].push_back(k);
    }
  }
  auto co_occur = [&](const Load& a, const Load& b) {
    const auto ia = member_of.find(mining::abstract_load(a));
    const auto ib = member_of.find(mining::abstract_load(b));
    if (ia == member_of.end() || ib == member_of.end()) return false;
    auto x = ia->second.begin(), y = ib->second.begin();
    while (x != ia->second.end() && y != ib->second.end()) {
      if (*x == *y) return true;
      if (*x < *y) ++x; else ++y;
    }
    return false;
  };

  PathSet out;
  for (const Load* l : sorted) {
    if (!config.costs.knows(l->trailer_type)) {
      out.warnings.push_back("load " + l->id + ": unknown trailer type '" + l->trailer_type +
                             "', using default rate");
    }
    auto& paths = out.by_load[l->id];
    paths.push_back(direct_path(*l, distance, config.costs));

    for (const auto& [hub, hub_loads] : by_origin) {
      if (hub == l->origin) continue;
      if (hub_filter != nullptr && !hub_filter->count(hub)) continue;
      const double minutes = travel(l->origin.terminal, hub.terminal);
      const Load* best = nullptr;
      for (const Load* h : hub_loads) {
        if (h == l || h->destination != l->destination || h->due_day != l->due_day) continue;
        if (!kappa_op(*l, *h, travel, config.dwell_minutes)) continue;
        if (comembership != nullptr && !co_occur(*l, *h)) continue;
        if (best == nullptr || h->departure > best->departure) best = h;  // ids ascend: ties keep first
      }
      if (best == nullptr) continue;
      Path p;
      p.load_id = l->id;
      p.kind = PathKind::consolidation;
      p.hub = hub;
      p.last_leg_origin = hub;
      p.hub_load_id = best->id;
      p.detour_minutes = minutes;
      p.detour_miles = distance(l->origin.terminal, hub.terminal);
      p.last_leg_miles = distance(hub.terminal, l->destination.terminal);
      p.detour_cost = cost(p.detour_miles, l->trailer_type, config.costs);
      p.last_leg_cost = cost(p.last_leg_miles, l->trailer_type, config.costs);
      paths.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace

PathSet generate_paths(const std::vector<Load>& lc, const std::set<Node>& hubs,
                       const std::vector<mining::CandidateSet>& candidates,
                       const geo::TravelFn& travel, const geo::DistanceFn& distance,
                       const PathGenConfig& config) {
  return generate(lc, &hubs, config.require_comembership ? &candidates : nullptr, travel, distance,
                  config);
}

PathSet generate_paths_unfiltered(const std::vector<Load>& loads, const geo::TravelFn& travel,
                                  const geo::DistanceFn& distance, const PathGenConfig& config) {
  return generate(loads, nullptr, nullptr, travel, distance, config);
}

}  // namespace loadcons::pathgen
