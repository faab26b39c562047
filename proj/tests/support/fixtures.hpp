#pragma once

#include <random>
#include <string>
#include <vector>

#include "loadcons/model.hpp"
#include "loadcons/pathgen.hpp"
#include "loadcons/solver.hpp"

namespace fixture {

struct RandomInstanceSpec {
  int min_loads = 1;
  int max_loads = 8;
  int max_nodes = 5;
  double path_density = 0.6;  // chance of a consolidation path to each other node
  bool integer_costs = true;
  bool random_scope = true;   // sometimes constrain mined hubs only
};

loadcons::solver::Instance random_instance(std::mt19937_64& rng, const RandomInstanceSpec& spec = {});

// Two loads at different origins; load A can detour (cost 10) to B's origin.
// q = (30, 40), Q = (100, 100), last-leg cost 100 everywhere.
loadcons::solver::Instance two_load_instance();

loadcons::pathgen::Path direct(const std::string& load, const std::string& origin, double f, double miles = -1.0);
loadcons::pathgen::Path via(const std::string& load, const std::string& hub, const std::string& hub_load, double c,
                            double f, double minutes = 60.0);

// Four terminals on a line heading east towards D at (40, -80):
// A (40, -100), B (40, -95), C (40, -90) and D. Each has sorts S1 (arr 360,
// dep 600) and S2 (arr 960, dep 1200).
loadcons::Network line_network(std::vector<loadcons::Load> loads = {});

loadcons::Load make_load(const std::string& id, const std::string& origin_terminal, const std::string& origin_sort,
                         std::int64_t departure, std::int64_t due_day, double volume, double capacity = 100.0,
                         const std::string& dest_terminal = "D", const std::string& dest_sort = "S1");

}  // namespace fixture
