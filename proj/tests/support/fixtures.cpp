#include "fixtures.hpp"

#include <cstdio>
#include <map>
#include <set>

namespace fixture {

using namespace loadcons;

pathgen::Path direct(const std::string& load, const std::string& origin, double f, double miles) {
  pathgen::Path p;
  p.load_id = load;
  p.kind = pathgen::PathKind::direct;
  p.last_leg_origin = {origin, "S1"};
  p.last_leg_cost = f;
  p.last_leg_miles = miles < 0.0 ? f : miles;
  return p;
}

pathgen::Path via(const std::string& load, const std::string& hub, const std::string& hub_load, double c, double f,
                  double minutes) {
  pathgen::Path p;
  p.load_id = load;
  p.kind = pathgen::PathKind::consolidation;
  p.hub = Node{hub, "S1"};
  p.last_leg_origin = {hub, "S1"};
  p.hub_load_id = hub_load;
  p.detour_cost = c;
  p.detour_miles = c;
  p.last_leg_cost = f;
  p.last_leg_miles = f;
  p.detour_minutes = minutes;
  return p;
}

solver::Instance random_instance(std::mt19937_64& rng, const RandomInstanceSpec& spec) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto num = [&](int lo, int hi) { return spec.integer_costs ? static_cast<double>(uni(lo, hi)) : real(lo, hi); };

  const int n = uni(spec.min_loads, spec.max_loads);
  const int k = uni(1, std::max(1, std::min(n, spec.max_nodes)));
  std::vector<double> node_f(k);
  for (auto& f : node_f) f = num(50, 300);

  std::vector<solver::InstanceLoad> loads;
  std::vector<int> origin(n);
  std::map<int, std::vector<int>> at_node;
  for (int i = 0; i < n; ++i) {
    origin[i] = uni(0, k - 1);
    at_node[origin[i]].push_back(i);
    const double cap = uni(0, 9) < 7 ? 100.0 : 160.0;
    const double vol = static_cast<double>(uni(5, static_cast<int>(0.78 * cap)));
    char id[16];
    std::snprintf(id, sizeof id, "L%02d", i);
    loads.push_back({id, vol, cap, static_cast<std::int64_t>(uni(0, 2000))});
  }
  std::vector<std::vector<pathgen::Path>> paths(n);
  for (int i = 0; i < n; ++i) {
    const std::string node = "N" + std::to_string(origin[i]);
    const double bump = loads[i].capacity > 100.0 ? 10.0 : 0.0;
    paths[i].push_back(direct(loads[i].id, node, node_f[origin[i]] + bump));
    for (int h = 0; h < k; ++h) {
      if (h == origin[i] || !at_node.count(h) || real(0.0, 1.0) >= spec.path_density) continue;
      const auto& hubs = at_node.at(h);
      const int hub_load = hubs[uni(0, static_cast<int>(hubs.size()) - 1)];
      paths[i].push_back(via(loads[i].id, "N" + std::to_string(h), loads[hub_load].id, num(0, 120),
                             node_f[h] + bump, static_cast<double>(uni(10, 500))));
    }
  }
  auto scope = solver::CapacityScope::all;
  std::set<Node> hubs;
  if (spec.random_scope && uni(0, 3) == 0) {
    scope = solver::CapacityScope::hubs;
    for (int h = 0; h < k; ++h) {
      if (uni(0, 1)) hubs.insert(Node{"N" + std::to_string(h), "S1"});
    }
  }
  return solver::build_instance(std::move(loads), std::move(paths), scope, hubs);
}

solver::Instance two_load_instance() {
  std::vector<solver::InstanceLoad> loads{{"A", 30.0, 100.0, 0}, {"B", 40.0, 100.0, 100}};
  std::vector<std::vector<pathgen::Path>> paths{{direct("A", "OA", 100.0), via("A", "OB", "B", 10.0, 100.0)},
                                                {direct("B", "OB", 100.0)}};
  return solver::build_instance(std::move(loads), std::move(paths));
}

Network line_network(std::vector<Load> loads) {
  std::vector<Terminal> terminals{{"A", 40.0, -100.0}, {"B", 40.0, -95.0}, {"C", 40.0, -90.0}, {"D", 40.0, -80.0}};
  std::vector<Sort> sorts;
  for (const auto& t : terminals) {
    sorts.push_back({t.id, "S1", 600, 360});
    sorts.push_back({t.id, "S2", 1200, 960});
  }
  return Network(std::move(terminals), std::move(sorts), std::move(loads));
}

Load make_load(const std::string& id, const std::string& origin_terminal, const std::string& origin_sort,
               std::int64_t departure, std::int64_t due_day, double volume, double capacity,
               const std::string& dest_terminal, const std::string& dest_sort) {
  Load l;
  l.id = id;
  l.origin = {origin_terminal, origin_sort};
  l.destination = {dest_terminal, dest_sort};
  l.departure = departure;
  l.due_day = due_day;
  l.volume = volume;
  l.capacity = capacity;
  l.trailer_type = capacity > 100.0 ? "large" : "std";
  return l;
}

}  // namespace fixture
