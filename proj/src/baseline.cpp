#include "loadcons/baseline.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace loadcons::baseline {

solver::Plan plan_tl(const solver::Instance& instance) {
  const std::size_t n = instance.loads.size();
  solver::Plan plan = solver::make_plan(instance, std::vector<std::size_t>(n, 0), std::vector<char>(n, 1));
  plan.optimal = false;
  return plan;
}

NnchResult run_nnch(const solver::Instance& instance) {
  const std::size_t n = instance.loads.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[instance.loads[i].id] = i;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& la = instance.loads[a];
    const auto& lb = instance.loads[b];
    return la.departure != lb.departure ? la.departure < lb.departure : la.id < lb.id;
  });

  std::vector<std::size_t> choice(n, 0);
  std::vector<char> active(n, 1), done(n, 0);
  NnchResult out;

  for (std::size_t o : order) {
    if (done[o]) continue;
    done[o] = 1;
    const auto& lo = instance.loads[o];

    struct Candidate {
      std::size_t path;
      std::size_t hub_load;
      double minutes;
    };
    std::vector<Candidate> cands;
    for (std::size_t p = 0; p < instance.paths[o].size(); ++p) {
      const auto& path = instance.paths[o][p];
      if (path.kind != pathgen::PathKind::consolidation) continue;
      const auto it = index.find(path.hub_load_id);
      if (it == index.end() || done[it->second]) continue;
      cands.push_back({p, it->second, path.detour_minutes});
    }
    std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
      if (a.minutes != b.minutes) return a.minutes < b.minutes;
      return instance.loads[a.hub_load].id < instance.loads[b.hub_load].id;
    });

    bool paired = false;
    for (const auto& c : cands) {
      const auto& lh = instance.loads[c.hub_load];
      if (lo.volume + lh.volume > std::max(lo.capacity, lh.capacity)) continue;
      done[c.hub_load] = 1;
      choice[o] = c.path;
      const bool keep_rider = lo.capacity > lh.capacity;
      active[o] = keep_rider ? 1 : 0;
      active[c.hub_load] = keep_rider ? 0 : 1;
      out.decisions.push_back({lo.id, lh.id});
      paired = true;
      break;
    }
    if (!paired) out.decisions.push_back({lo.id, ""});
  }

  out.plan = solver::make_plan(instance, choice, active);
  out.plan.optimal = false;
  return out;
}

solver::Plan plan_nnch(const solver::Instance& instance) { return run_nnch(instance).plan; }

}  // namespace loadcons::baseline
