#include "loadcons/cluster.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

#include <omp.h>

namespace loadcons::cluster {

EventPoints build_event_points(const std::vector<Load>& loads, const Network& network,
                               geo::Reference ref) {
  EventPoints out;
  out.points.reserve(loads.size());
  for (const auto& l : loads) {
    const Terminal* o = network.find_terminal(l.origin.terminal);
    const Terminal* d = network.find_terminal(l.destination.terminal);
    if (o == nullptr || d == nullptr) {
      out.skipped.push_back({l.id, "unknown terminal"});
      continue;
    }
    if (o->id == d->id) {
      out.skipped.push_back({l.id, "origin terminal equals destination terminal"});
      continue;
    }
    try {
      out.points.push_back(
          {l.id, l.origin, l.destination, l.due_day, geo::route_bearing(geo::position(*o), geo::position(*d), ref)});
    } catch (const geo::DegenerateBearing&) {
      out.skipped.push_back({l.id, "origin coincides with destination"});
    }
  }
  return out;
}

namespace {

using GroupKey = std::pair<Node, std::int64_t>;

std::map<GroupKey, std::vector<EventPoint>> group_points(const std::vector<EventPoint>& points) {
  std::map<GroupKey, std::vector<EventPoint>> groups;
  for (const auto& p : points) groups[{p.destination, p.due_day}].push_back(p);
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const EventPoint& a, const EventPoint& b) { return a.load_id < b.load_id; });
  }
  return groups;
}

void check_params(const ClusterParams& params) {
  if (!(params.eps > 0.0)) throw ConfigError("eps must be positive");
  if (params.min_pts < 2) throw ConfigError("min_pts must be at least 2");
}

// Classic DBSCAN over one (destination, due_day) group, points sorted by id.
ClusterResult dbscan_group(const GroupKey& key, const std::vector<EventPoint>& pts,
                           const ClusterParams& params) {
  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  const std::size_t n = pts.size();
  std::vector<int> label(n, kUnvisited);

  auto neighbours = [&](std::size_t i) {
    std::vector<std::size_t> nb;
    for (std::size_t j = 0; j < n; ++j) {
      if (geo::angle_distance(pts[i].bearing, pts[j].bearing) <= params.eps) nb.push_back(j);
    }
    return nb;
  };

  int next_cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    auto nb = neighbours(i);
    if (static_cast<int>(nb.size()) < params.min_pts) {
      label[i] = kNoise;
      continue;
    }
    const int c = next_cluster++;
    label[i] = c;
    std::deque<std::size_t> frontier(nb.begin(), nb.end());
    while (!frontier.empty()) {
      const std::size_t j = frontier.front();
      frontier.pop_front();
      if (label[j] == kNoise) label[j] = c;  // border point
      if (label[j] != kUnvisited) continue;
      label[j] = c;
      auto nb_j = neighbours(j);
      if (static_cast<int>(nb_j.size()) >= params.min_pts) {
        frontier.insert(frontier.end(), nb_j.begin(), nb_j.end());
      }
    }
  }

  ClusterResult out;
  std::vector<Cluster> clusters(static_cast<std::size_t>(next_cluster));
  for (auto& c : clusters) {
    c.destination = key.first;
    c.due_day = key.second;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) {
      clusters[static_cast<std::size_t>(label[i])].members.push_back(pts[i]);
    } else {
      out.noise.push_back(pts[i].load_id);
    }
  }
  out.clusters = std::move(clusters);
  return out;
}

void canonicalize(ClusterResult& r) {
  std::sort(r.clusters.begin(), r.clusters.end(), [](const Cluster& a, const Cluster& b) {
    return std::tie(a.destination, a.due_day, a.members.front().load_id) <
           std::tie(b.destination, b.due_day, b.members.front().load_id);
  });
  std::sort(r.noise.begin(), r.noise.end());
}

void append(ClusterResult& into, ClusterResult&& part) {
  for (auto& c : part.clusters) into.clusters.push_back(std::move(c));
  for (auto& id : part.noise) into.noise.push_back(std::move(id));
}

}  // namespace

ClusterResult st_dbscan(const std::vector<EventPoint>& points, const ClusterParams& params) {
  check_params(params);
  ClusterResult out;
  for (const auto& [key, members] : group_points(points)) {
    append(out, dbscan_group(key, members, params));
  }
  canonicalize(out);
  return out;
}

ClusterResult st_dbscan_parallel(const std::vector<EventPoint>& points, const ClusterParams& params,
                                 int threads) {
  check_params(params);
  const auto groups = group_points(points);
  std::vector<const std::pair<const GroupKey, std::vector<EventPoint>>*> work;
  work.reserve(groups.size());
  for (const auto& g : groups) work.push_back(&g);

  std::vector<ClusterResult> parts(work.size());
  const auto n = static_cast<std::ptrdiff_t>(work.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& g = *work[static_cast<std::size_t>(i)];
    parts[static_cast<std::size_t>(i)] = dbscan_group(g.first, g.second, params);
  }

  ClusterResult out;
  for (auto& p : parts) append(out, std::move(p));
  canonicalize(out);
  return out;
}

}  // namespace loadcons::cluster
