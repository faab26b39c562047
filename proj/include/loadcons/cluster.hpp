#pragma once

#include <map>
#include <string>
#include <vector>

#include "loadcons/geo.hpp"
#include "loadcons/model.hpp"

namespace loadcons::cluster {

struct EventPoint {
  std::string load_id;
  Node origin;
  Node destination;
  std::int64_t due_day = 0;
  geo::BearingAngle bearing;  // origin terminal -> destination terminal
};

struct Cluster {
  Node destination;
  std::int64_t due_day = 0;
  std::vector<EventPoint> members;  // sorted by load_id
};

struct SkippedLoad {
  std::string load_id;
  std::string reason;
};

struct EventPoints {
  std::vector<EventPoint> points;
  std::vector<SkippedLoad> skipped;
};

// One point per load. Loads whose origin shares the destination terminal's
// coordinates have no route bearing and are reported as skipped.
EventPoints build_event_points(const std::vector<Load>& loads, const Network& network,
                               geo::Reference ref = geo::Reference::west);

struct ClusterParams {
  double eps = 0.30;  // radians on the route-bearing distance
  int min_pts = 2;
};

struct ClusterResult {
  std::vector<Cluster> clusters;        // canonical order, see st_dbscan
  std::vector<std::string> noise;       // load ids, sorted
};

// DBSCAN where two points are neighbours iff they share destination and
// due_day and their bearings are within eps. Iteration follows ascending
// load_id, so a border point shared by two clusters joins the one whose core
// is reached first in that order. Clusters come out sorted by
// (destination, due_day, first member id).
ClusterResult st_dbscan(const std::vector<EventPoint>& points, const ClusterParams& params);

// Same result as st_dbscan; the (destination, due_day) groups are clustered
// on an OpenMP team of `threads` workers.
ClusterResult st_dbscan_parallel(const std::vector<EventPoint>& points, const ClusterParams& params,
                                 int threads);

}  // namespace loadcons::cluster
