#include "loadcons/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace loadcons::solver {

namespace {

constexpr double kVolumeTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

double tie_eps(double v) { return 1e-9 * std::max(1.0, std::fabs(v)); }

bool covered(double capacity, double demand) { return capacity >= demand - kVolumeTol; }

}  // namespace

CapacityScope parse_capacity_scope(const std::string& name) {
  if (name == "paper") return CapacityScope::hubs;
  if (name == "all") return CapacityScope::all;
  throw ConfigError("capacity scope must be 'paper' or 'all', got '" + name + "'");
}

std::string to_string(CapacityScope s) { return s == CapacityScope::hubs ? "paper" : "all"; }

std::size_t Instance::path_count() const {
  std::size_t n = 0;
  for (const auto& p : paths) n += p.size();
  return n;
}

Instance build_instance(std::vector<InstanceLoad> loads, std::vector<std::vector<pathgen::Path>> paths,
                        CapacityScope scope, const std::set<Node>& hubs) {
  if (loads.size() != paths.size()) throw ContractViolation("one path list per load required");
  std::vector<std::size_t> perm(loads.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return loads[a].id < loads[b].id; });

  Instance in;
  for (std::size_t i : perm) {
    auto& ps = paths[i];
    const auto n_direct = std::count_if(ps.begin(), ps.end(),
                                        [](const pathgen::Path& p) { return p.kind == pathgen::PathKind::direct; });
    if (n_direct != 1) throw ContractViolation("load " + loads[i].id + " needs exactly one direct path");
    std::stable_partition(ps.begin(), ps.end(),
                          [](const pathgen::Path& p) { return p.kind == pathgen::PathKind::direct; });
    in.loads.push_back(std::move(loads[i]));
    in.paths.push_back(std::move(ps));
  }

  std::set<Node> nodes;
  for (const auto& ps : in.paths) {
    for (const auto& p : ps) nodes.insert(p.last_leg_origin);
  }
  in.nodes.assign(nodes.begin(), nodes.end());
  for (const auto& n : in.nodes) {
    in.constrained.push_back(scope == CapacityScope::all || hubs.count(n) ? 1 : 0);
  }
  for (const auto& ps : in.paths) {
    std::vector<std::size_t> idx;
    for (const auto& p : ps) {
      idx.push_back(static_cast<std::size_t>(
          std::lower_bound(in.nodes.begin(), in.nodes.end(), p.last_leg_origin) - in.nodes.begin()));
    }
    in.oll.push_back(std::move(idx));
  }
  return in;
}

Instance make_instance(const std::vector<Load>& loads, const pathgen::PathSet& paths,
                       const geo::DistanceFn& distance, const pathgen::CostModel& costs,
                       CapacityScope scope, const std::set<Node>& hubs) {
  std::vector<InstanceLoad> il;
  std::vector<std::vector<pathgen::Path>> pl;
  for (const auto& l : loads) {
    il.push_back({l.id, l.volume, l.capacity, l.departure});
    const auto it = paths.by_load.find(l.id);
    if (it != paths.by_load.end()) {
      pl.push_back(it->second);
    } else {
      pl.push_back({pathgen::direct_path(l, distance, costs)});
    }
  }
  return build_instance(std::move(il), std::move(pl), scope, hubs);
}

std::size_t Plan::active_trailers() const {
  return static_cast<std::size_t>(
      std::count_if(assignments.begin(), assignments.end(), [](const Assignment& a) { return a.active; }));
}

std::vector<std::size_t> Plan::choices(std::size_t n_loads) const {
  std::vector<std::size_t> out(n_loads, 0);
  for (const auto& a : assignments) {
    if (a.routed && a.load < n_loads) out[a.load] = a.path;
  }
  return out;
}

double objective_of(const Instance& instance, const Plan& plan) {
  double total = 0.0;
  for (const auto& a : plan.assignments) {
    const auto& p = instance.paths.at(a.load).at(a.path);
    if (a.routed) total += p.detour_cost;
    if (a.active) total += p.last_leg_cost;
  }
  return total;
}

Plan make_plan(const Instance& instance, const std::vector<std::size_t>& choice,
               const std::vector<char>& active) {
  Plan plan;
  for (std::size_t l = 0; l < instance.loads.size(); ++l) {
    plan.assignments.push_back({l, choice[l], true, active[l] != 0});
  }
  plan.objective = objective_of(instance, plan);
  return plan;
}

Cover best_cover(std::vector<Trailer> trailers, double demand) {
  Cover best;
  if (demand <= kVolumeTol) {
    best.feasible = true;
    return best;
  }
  std::erase_if(trailers, [](const Trailer& t) { return !(t.capacity > 0.0); });
  std::sort(trailers.begin(), trailers.end(), [](const Trailer& a, const Trailer& b) { return a.load < b.load; });
  const std::size_t n = trailers.size();
  std::vector<double> rest_capacity(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) rest_capacity[i] = rest_capacity[i + 1] + trailers[i].capacity;
  if (!covered(rest_capacity[0], demand)) return best;

  std::vector<std::size_t> by_ratio(n);
  std::iota(by_ratio.begin(), by_ratio.end(), 0);
  std::sort(by_ratio.begin(), by_ratio.end(), [&](std::size_t a, std::size_t b) {
    return trailers[a].cost / trailers[a].capacity < trailers[b].cost / trailers[b].capacity;
  });

  // Fractional cover of `need` using trailers at positions >= from.
  auto fractional = [&](std::size_t from, double need) {
    double c = 0.0;
    for (std::size_t i : by_ratio) {
      if (i < from) continue;
      const auto& t = trailers[i];
      if (t.capacity >= need) return c + t.cost * (need / t.capacity);
      c += t.cost;
      need -= t.capacity;
    }
    return c;
  };

  std::vector<std::size_t> chosen;
  auto consider = [&](double cost) {
    bool take = !best.feasible || cost < best.cost - tie_eps(best.cost);
    if (!take && std::fabs(cost - best.cost) <= tie_eps(best.cost)) {
      take = chosen.size() < best.chosen.size() ||
             (chosen.size() == best.chosen.size() && chosen < best.chosen);
    }
    if (take) {
      best.feasible = true;
      best.cost = cost;
      best.chosen = chosen;
    }
  };

  auto dfs = [&](auto&& self, std::size_t k, double cost, double need) -> void {
    if (need <= kVolumeTol) {
      consider(cost);
      return;
    }
    if (k == n || !covered(rest_capacity[k], need)) return;
    if (best.feasible && cost + fractional(k, need) > best.cost + tie_eps(best.cost)) return;
    chosen.push_back(trailers[k].load);
    self(self, k + 1, cost + trailers[k].cost, need - trailers[k].capacity);
    chosen.pop_back();
    self(self, k + 1, cost, need);
  };
  dfs(dfs, 0, 0.0, demand);
  return best;
}

namespace {

using Clock = std::chrono::steady_clock;

struct SharedBudget {
  Budget limits;
  Clock::time_point start = Clock::now();
  std::uint64_t nodes = 0;
  bool exhausted = false;

  bool tick() {
    ++nodes;
    if (nodes >= limits.max_nodes) exhausted = true;
    if ((nodes & 1023u) == 0) {
      const double secs = std::chrono::duration<double>(Clock::now() - start).count();
      if (secs >= limits.max_seconds) exhausted = true;
    }
    return !exhausted;
  }
};

struct Incumbent {
  bool found = false;
  double objective = kInf;
  std::size_t trailers = 0;
  std::vector<std::size_t> choice;  // per component load (branch order irrelevant: indexed by position in `loads`)
  std::vector<char> active;

  // Strictly better under (objective, trailers, choice lexicographic).
  bool improved_by(double obj, std::size_t tr, const std::vector<std::size_t>& ch) const {
    if (!found) return true;
    const double eps = tie_eps(objective);
    if (obj < objective - eps) return true;
    if (obj > objective + eps) return false;
    if (tr != trailers) return tr < trailers;
    return ch < choice;
  }
};

// Exact search over one connected component of loads.
//
// Bound: price out the one-path rule with a multiplier per load. What is left
// splits by hub, and each hub is solved exactly: pick the loads worth their
// price and switch on enough of their trailers. Prices come from a
// subgradient ascent at the root, which also rounds its hub solutions into
// incumbents; options whose bound exceeds the incumbent are dropped before
// branching.
class ComponentSearch {
 public:
  ComponentSearch(const Instance& in, std::vector<std::size_t> loads, SharedBudget& budget)
      : in_(in), loads_(std::move(loads)), budget_(budget) {
    index();
  }

  void offer(const std::vector<std::size_t>& global_choice) {
    std::vector<std::size_t> ch(loads_.size());
    for (std::size_t i = 0; i < loads_.size(); ++i) ch[i] = global_choice[loads_[i]];
    local_search(ch);
    consider_complete(ch);
  }

  // Returns true when the search proved optimality.
  bool run() {
    reset_state();
    init_prices();
    for (int round = 0; round < 3 && !aborted_; ++round) {
      ascend(round == 0 ? 300 : 80);
      if (aborted_ || !fix_options()) break;
    }
    if (aborted_) return false;
    order();
    refresh_all();
    descend(0);
    return !aborted_;
  }

  const Incumbent& best() const { return best_; }

 private:
  static constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
  static constexpr std::size_t kNoHub = std::numeric_limits<std::size_t>::max();

  struct Option {
    std::size_t hub;  // kNoHub: last leg starts at an unconstrained node
    double detour;
    double last_leg;
  };
  struct Slot {
    std::size_t local;
    std::size_t option;
  };
  struct Item {
    double value;  // detour minus price; 0 once the load is fixed here
    double volume;
    double capacity;
    double trailer;
    bool fixed;
    std::size_t local;
    std::size_t option;
  };

  const Instance& in_;
  std::vector<std::size_t> loads_;
  SharedBudget& budget_;

  std::vector<std::vector<Option>> options_;       // local load -> options (= path indices)
  std::vector<std::vector<std::size_t>> hubs_of_;  // local load -> hubs it may reach
  std::vector<std::vector<Slot>> hubs_;
  std::vector<std::vector<char>> alive_;
  std::vector<std::vector<double>> reduced_;
  std::vector<std::vector<std::size_t>> value_order_;
  std::vector<std::size_t> order_;
  std::vector<double> price_;
  mutable std::vector<std::size_t> picked_;  // option each load's hub solutions chose, if any

  std::vector<std::size_t> choice_;
  std::vector<double> g_;
  double g_sum_ = 0.0;
  std::size_t g_inf_ = 0;
  double committed_ = 0.0;
  double free_sum_ = 0.0;
  bool aborted_ = false;
  Incumbent best_;

  // scratch for hub_value
  mutable std::vector<Item> items_;
  struct State {
    double spare;
    double value;
    std::uint32_t parent;
    std::uint32_t kind;  // 0 out, 1 carried, 2 carried with its trailer on
  };
  mutable std::vector<double> need_, gain_;
  mutable std::vector<State> front_, cand_;
  mutable std::vector<std::vector<State>> layers_;

  double q(std::size_t i) const { return in_.loads[loads_[i]].volume; }
  double cap(std::size_t i) const { return in_.loads[loads_[i]].capacity; }

  void index() {
    std::map<std::size_t, std::size_t> hub_of_node;
    const std::size_t n = loads_.size();
    options_.resize(n);
    hubs_of_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& paths = in_.paths[loads_[i]];
      const auto& olls = in_.oll[loads_[i]];
      for (std::size_t p = 0; p < paths.size(); ++p) {
        Option o{kNoHub, paths[p].detour_cost, paths[p].last_leg_cost};
        if (in_.constrained[olls[p]]) {
          auto [it, inserted] = hub_of_node.emplace(olls[p], hubs_.size());
          if (inserted) hubs_.emplace_back();
          o.hub = it->second;
          hubs_[o.hub].push_back({i, p});
          if (std::find(hubs_of_[i].begin(), hubs_of_[i].end(), o.hub) == hubs_of_[i].end()) {
            hubs_of_[i].push_back(o.hub);
          }
        }
        options_[i].push_back(o);
      }
    }
    alive_.resize(n);
    reduced_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      alive_[i].assign(options_[i].size(), 1);
      reduced_[i].assign(options_[i].size(), 0.0);
    }
  }

  void reset_state() {
    choice_.assign(loads_.size(), kUnassigned);
    g_.assign(hubs_.size(), 0.0);
    committed_ = 0.0;
    aborted_ = false;
  }

  // ---- incumbents -------------------------------------------------------

  // Exact trailer cover per hub for a complete choice vector.
  struct HubCosts {
    std::vector<double> demand;
    std::vector<std::vector<Trailer>> trailers;
    std::vector<Cover> covers;
    double detours = 0.0;
    bool feasible = true;

    double objective() const {
      double v = detours;
      for (const auto& c : covers) v += c.cost;
      return v;
    }
    std::size_t count() const {
      std::size_t t = 0;
      for (const auto& c : covers) t += c.chosen.size();
      return t;
    }
  };

  HubCosts cost_all(const std::vector<std::size_t>& ch) const {
    HubCosts hc;
    hc.demand.assign(hubs_.size(), 0.0);
    hc.trailers.assign(hubs_.size(), {});
    hc.covers.assign(hubs_.size(), Cover{true, 0.0, {}});
    for (std::size_t i = 0; i < loads_.size(); ++i) {
      const Option& o = options_[i][ch[i]];
      hc.detours += o.detour;
      if (o.hub == kNoHub) continue;
      hc.demand[o.hub] += q(i);
      hc.trailers[o.hub].push_back({i, cap(i), o.last_leg});
    }
    for (std::size_t h = 0; h < hubs_.size(); ++h) {
      hc.covers[h] = best_cover(hc.trailers[h], hc.demand[h]);
      if (!hc.covers[h].feasible) hc.feasible = false;
    }
    return hc;
  }

  void consider_complete(const std::vector<std::size_t>& ch) {
    const HubCosts hc = cost_all(ch);
    if (!hc.feasible) return;
    const double obj = hc.objective();
    const std::size_t trailers = hc.count();
    if (!best_.improved_by(obj, trailers, ch)) return;
    best_.found = true;
    best_.objective = obj;
    best_.trailers = trailers;
    best_.choice = ch;
    best_.active.assign(loads_.size(), 0);
    for (const auto& c : hc.covers) {
      for (std::size_t i : c.chosen) best_.active[i] = 1;
    }
  }

  Cover recover(std::size_t h, const std::vector<std::size_t>& ch) const {
    std::vector<Trailer> trailers;
    double demand = 0.0;
    for (const Slot& s : hubs_[h]) {
      if (ch[s.local] != s.option) continue;
      trailers.push_back({s.local, cap(s.local), options_[s.local][s.option].last_leg});
      demand += q(s.local);
    }
    return best_cover(std::move(trailers), demand);
  }

  // First-improvement single-load moves; only the two touched hubs are re-covered.
  void local_search(std::vector<std::size_t>& ch) const {
    HubCosts hc = cost_all(ch);
    if (!hc.feasible) {
      repair(ch);
      hc = cost_all(ch);
    }
    double cur = hc.objective();
    for (int pass = 0; pass < 20; ++pass) {
      bool moved = false;
      for (std::size_t i = 0; i < loads_.size(); ++i) {
        const std::size_t keep = ch[i];
        const std::size_t from = options_[i][keep].hub;
        for (std::size_t p = 0; p < options_[i].size(); ++p) {
          if (p == keep) continue;
          const std::size_t to = options_[i][p].hub;
          ch[i] = p;
          double next = cur - options_[i][keep].detour + options_[i][p].detour;
          Cover c_from, c_to;
          bool ok = true;
          if (from != kNoHub) {
            c_from = recover(from, ch);
            ok = ok && c_from.feasible;
            next += c_from.cost - hc.covers[from].cost;
          }
          if (to != kNoHub && to != from) {
            c_to = recover(to, ch);
            ok = ok && c_to.feasible;
            next += c_to.cost - hc.covers[to].cost;
          }
          if (ok && next < cur - tie_eps(cur)) {
            if (from != kNoHub) hc.covers[from] = c_from;
            if (to != kNoHub && to != from) hc.covers[to] = c_to;
            cur = next;
            moved = true;
            break;
          }
          ch[i] = keep;
        }
      }
      if (!moved) break;
    }
  }

  // Sends the bulkiest rerouted load of an overloaded hub back to its direct
  // path until every hub is covered. A node holding only direct loads is
  // always covered, so this ends.
  void repair(std::vector<std::size_t>& ch) const {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t h = 0; h < hubs_.size(); ++h) {
        while (!recover(h, ch).feasible) {
          std::size_t worst = kUnassigned;
          for (const Slot& s : hubs_[h]) {
            if (ch[s.local] != s.option || s.option == 0) continue;
            if (worst == kUnassigned || q(s.local) > q(worst)) worst = s.local;
          }
          if (worst == kUnassigned) break;
          ch[worst] = 0;
          moved = true;
        }
      }
    }
  }

  // Plan from the hub solutions at the current prices: each load takes the
  // option a hub picked for it, else its direct path.
  void round_prices() {
    std::vector<std::size_t> ch(loads_.size(), 0);
    for (std::size_t i = 0; i < loads_.size(); ++i) {
      if (picked_[i] != kUnassigned) ch[i] = picked_[i];
    }
    local_search(ch);
    consider_complete(ch);
  }

  // ---- bound --------------------------------------------------------------

  // Cheapest unconstrained option still open to a free load.
  double free_value(std::size_t i) const {
    double u = kInf;
    for (std::size_t o = 0; o < options_[i].size(); ++o) {
      if (alive_[i][o] && options_[i][o].hub == kNoHub) u = std::min(u, options_[i][o].detour);
    }
    return std::min(price_[i], u);
  }

  // Least total of (detour - price) over the free loads sent to hub h, plus
  // trailer costs, given the loads already fixed there. Each load is left
  // out, carried, or carried with its trailer on; the capacity left over
  // must end non-negative. Keeps the Pareto front of (spare capacity, value)
  // per prefix of the loads. When `take` is given, marks the free loads of
  // the optimum.
  double hub_value(std::size_t h, std::vector<double>* take) const {
    items_.clear();
    bool any = false;
    for (const Slot& sl : hubs_[h]) {
      const std::size_t ch = choice_[sl.local];
      const bool fixed = ch == sl.option;
      if (!fixed && (ch != kUnassigned || !alive_[sl.local][sl.option])) continue;
      const Option& o = options_[sl.local][sl.option];
      const double value = fixed ? 0.0 : o.detour - price_[sl.local];
      items_.push_back({value, q(sl.local), cap(sl.local), o.last_leg, fixed, sl.local, sl.option});
      any = any || fixed || value < 0.0;
    }
    if (!any) return 0.0;
    const std::size_t m = items_.size();
    // Past the volume still to come, spare capacity is worth nothing more;
    // below minus the capacity still to come, nothing can recover.
    need_.assign(m + 1, 0.0);
    gain_.assign(m + 1, 0.0);
    for (std::size_t k = m; k-- > 0;) {
      const Item& it = items_[k];
      need_[k] = need_[k + 1] + (it.fixed || it.value < 0.0 ? it.volume : 0.0);
      gain_[k] = gain_[k + 1] + std::max(0.0, it.capacity - it.volume);
    }
    const bool trace = take != nullptr;
    layers_.resize(trace ? m + 1 : 1);
    front_.assign(1, {0.0, 0.0, 0, 0});
    if (trace) layers_[0] = front_;
    for (std::size_t k = 0; k < m; ++k) {
      const Item& it = items_[k];
      const bool passive = it.fixed || it.value < 0.0;
      const double top = need_[k + 1], floor = -gain_[k + 1] - kVolumeTol;
      cand_.clear();
      for (std::uint32_t s = 0; s < front_.size(); ++s) {
        const State& st = front_[s];
        if (!it.fixed && st.spare >= floor) cand_.push_back({std::min(st.spare, top), st.value, s, 0});
        if (passive && st.spare - it.volume >= floor) {
          cand_.push_back({std::min(st.spare - it.volume, top), st.value + it.value, s, 1});
        }
        const double up = st.spare + it.capacity - it.volume;
        if (up >= floor) cand_.push_back({std::min(up, top), st.value + it.value + it.trailer, s, 2});
      }
      // Most spare first; keep a state only when it is cheaper than every
      // state with more spare.
      std::sort(cand_.begin(), cand_.end(), [](const State& a, const State& b) {
        return a.spare != b.spare ? a.spare > b.spare : a.value < b.value;
      });
      front_.clear();
      double cheapest = kInf;
      for (const State& st : cand_) {
        if (st.value < cheapest - 1e-12) {
          front_.push_back(st);
          cheapest = st.value;
        }
      }
      if (front_.empty()) return kInf;
      if (trace) layers_[k + 1] = front_;
    }
    double best = kInf;
    std::uint32_t at = 0;
    for (std::uint32_t s = 0; s < front_.size(); ++s) {
      if (front_[s].spare >= -kVolumeTol && front_[s].value < best) {
        best = front_[s].value;
        at = s;
      }
    }
    if (trace && best < kInf) {
      for (std::size_t k = m; k-- > 0;) {
        const State& st = layers_[k + 1][at];
        const Item& it = items_[k];
        if (st.kind != 0 && !it.fixed) {
          (*take)[it.local] += 1.0;
          std::size_t& pick = picked_[it.local];
          if (pick == kUnassigned || options_[it.local][it.option].detour < options_[it.local][pick].detour) {
            pick = it.option;
          }
        }
        at = st.parent;
      }
    }
    return best;
  }

  void set_g(std::size_t h, double v) {
    if (g_[h] == kInf) {
      --g_inf_;
    } else {
      g_sum_ -= g_[h];
    }
    g_[h] = v;
    if (v == kInf) {
      ++g_inf_;
    } else {
      g_sum_ += v;
    }
  }

  void refresh_all() {
    g_.assign(hubs_.size(), 0.0);
    g_sum_ = 0.0;
    g_inf_ = 0;
    for (std::size_t h = 0; h < hubs_.size(); ++h) set_g(h, hub_value(h, nullptr));
    free_sum_ = 0.0;
    for (std::size_t i = 0; i < loads_.size(); ++i) {
      if (choice_[i] == kUnassigned) free_sum_ += free_value(i);
    }
  }

  double bound() const { return g_inf_ > 0 ? kInf : committed_ + free_sum_ + g_sum_; }

  // Start from each load's cheapest option with its own trailer cost spread
  // over its volume.
  void init_prices() {
    price_.assign(loads_.size(), 0.0);
    for (std::size_t i = 0; i < loads_.size(); ++i) {
      double best = kInf;
      for (const Option& o : options_[i]) {
        double v = o.detour;
        if (o.hub != kNoHub) v += o.last_leg * std::min(1.0, q(i) / std::max(cap(i), kVolumeTol));
        best = std::min(best, v);
      }
      price_[i] = best;
    }
  }

  // Subgradient ascent on the prices; keeps the best prices seen.
  void ascend(int iterations) {
    const std::size_t n = loads_.size();
    std::vector<double> best_price = price_, take(n);
    double best_bound = -kInf, theta = 1.0;
    int stall = 0;
    for (int it = 0; it < iterations; ++it) {
      if (!budget_.tick()) {
        aborted_ = true;
        break;
      }
      std::fill(take.begin(), take.end(), 0.0);
      picked_.assign(n, kUnassigned);
      double lb = committed_;
      for (std::size_t h = 0; h < hubs_.size(); ++h) lb += hub_value(h, &take);
      if (it % 5 == 0) round_prices();
      for (std::size_t i = 0; i < n; ++i) {
        const double fv = free_value(i);
        lb += fv;
        if (fv < price_[i]) take[i] += 1.0;
      }
      if (lb > best_bound + tie_eps(lb)) {
        best_bound = lb;
        best_price = price_;
        stall = 0;
      } else if (++stall >= 10) {
        theta *= 0.5;
        stall = 0;
      }
      if (!best_.found || best_bound >= best_.objective - tie_eps(best_.objective) || theta < 1e-4) break;
      double norm = 0.0;
      for (std::size_t i = 0; i < n; ++i) norm += (1.0 - take[i]) * (1.0 - take[i]);
      if (norm < 1e-12) break;
      const double step = theta * std::max(best_.objective - lb, 1e-6 * std::fabs(lb)) / norm;
      for (std::size_t i = 0; i < n; ++i) price_[i] += step * (1.0 - take[i]);
    }
    price_ = best_price;
    refresh_all();
  }

  // Drops options that cannot lead to a plan at least as good as the
  // incumbent. Returns true when anything was dropped.
  bool fix_options() {
    if (!best_.found) return false;
    const double limit = best_.objective + tie_eps(best_.objective);
    bool dropped = false;
    for (std::size_t i = 0; i < loads_.size(); ++i) {
      for (std::size_t o = 0; o < options_[i].size(); ++o) {
        if (!alive_[i][o]) continue;
        if (!budget_.tick()) {
          aborted_ = true;
          return false;
        }
        const auto saved = assign(i, o);
        reduced_[i][o] = bound();
        unassign(i, o, saved);
        if (reduced_[i][o] > limit) {
          alive_[i][o] = 0;
          dropped = true;
        }
      }
    }
    if (dropped) refresh_all();
    return dropped;
  }

  std::vector<double> assign(std::size_t i, std::size_t o) {
    free_sum_ -= free_value(i);
    choice_[i] = o;
    committed_ += options_[i][o].detour;
    std::vector<double> saved;
    saved.reserve(hubs_of_[i].size());
    for (std::size_t h : hubs_of_[i]) {
      saved.push_back(g_[h]);
      set_g(h, hub_value(h, nullptr));
    }
    return saved;
  }

  void unassign(std::size_t i, std::size_t o, const std::vector<double>& saved) {
    for (std::size_t k = 0; k < hubs_of_[i].size(); ++k) set_g(hubs_of_[i][k], saved[k]);
    committed_ -= options_[i][o].detour;
    choice_[i] = kUnassigned;
    free_sum_ += free_value(i);
  }

  // Forced loads first, then the loads whose best option stands out most.
  void order() {
    const std::size_t n = loads_.size();
    value_order_.assign(n, {});
    std::vector<double> regret(n, 0.0);
    std::vector<std::size_t> alive_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& vo = value_order_[i];
      for (std::size_t o = 0; o < options_[i].size(); ++o) {
        if (alive_[i][o]) vo.push_back(o);
      }
      std::stable_sort(vo.begin(), vo.end(), [&](std::size_t a, std::size_t b) { return reduced_[i][a] < reduced_[i][b]; });
      alive_count[i] = vo.size();
      regret[i] = vo.size() >= 2 ? reduced_[i][vo[1]] - reduced_[i][vo[0]] : kInf;
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      if ((alive_count[a] <= 1) != (alive_count[b] <= 1)) return alive_count[a] <= 1;
      return regret[a] > regret[b];
    });
  }

  void descend(std::size_t depth) {
    if (aborted_) return;
    if (!budget_.tick()) {
      aborted_ = true;
      return;
    }
    if (depth == loads_.size()) {
      consider_complete(choice_);
      return;
    }
    const double lb = bound();
    if (lb == kInf) return;
    if (best_.found && lb > best_.objective + tie_eps(best_.objective)) return;

    // Children cheapest bound first.
    const std::size_t i = order_[depth];
    std::vector<std::pair<double, std::size_t>> kids;
    for (std::size_t o : value_order_[i]) {
      const auto saved = assign(i, o);
      const double b = bound();
      unassign(i, o, saved);
      if (b < kInf) kids.emplace_back(b, o);
    }
    std::stable_sort(kids.begin(), kids.end());
    for (const auto& [b, o] : kids) {
      if (best_.found && b > best_.objective + tie_eps(best_.objective)) break;
      const auto saved = assign(i, o);
      descend(depth + 1);
      unassign(i, o, saved);
      if (aborted_) return;
    }
  }
};

std::vector<std::vector<std::size_t>> components(const Instance& in) {
  const std::size_t n = in.loads.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<std::size_t, std::size_t> first_at_node;
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t node : in.oll[l]) {
      if (!in.constrained[node]) continue;
      auto [it, inserted] = first_at_node.emplace(node, l);
      if (!inserted) parent[find(l)] = find(it->second);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t l = 0; l < n; ++l) groups[find(l)].push_back(l);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

}  // namespace

Plan solve_exact(const Instance& instance, const Budget& budget, const std::vector<Plan>& warm_starts) {
  SharedBudget shared{budget};
  const std::size_t n = instance.loads.size();
  std::vector<std::size_t> choice(n, 0);
  std::vector<char> active(n, 0);
  bool optimal = true;

  const auto comps = components(instance);
  for (const auto& members : comps) {
    ComponentSearch search(instance, members, shared);
    search.offer(std::vector<std::size_t>(n, 0));
    for (const auto& w : warm_starts) {
      if (w.assignments.size() == n) search.offer(w.choices(n));
    }
    if (!shared.exhausted) {
      if (!search.run()) optimal = false;
    } else {
      optimal = false;
    }
    const auto& best = search.best();
    for (std::size_t i = 0; i < members.size(); ++i) {
      choice[members[i]] = best.choice[i];
      active[members[i]] = best.active[i];
    }
  }

  Plan plan = make_plan(instance, choice, active);
  plan.optimal = optimal;
  plan.stats.nodes = shared.nodes;
  plan.stats.components = comps.size();
  plan.stats.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - shared.start).count();
  return plan;
}

Plan solve_bruteforce(const Instance& instance) {
  const std::size_t n = instance.loads.size();
  if (n > kBruteforceMaxLoads) {
    throw ContractViolation("solve_bruteforce supports at most " + std::to_string(kBruteforceMaxLoads) + " loads");
  }
  const auto start = Clock::now();
  std::vector<std::size_t> choice(n, 0), best_choice;
  std::vector<char> best_active;
  double best_obj = kInf;
  std::size_t best_trailers = 0;
  std::uint64_t evaluated = 0;

  while (true) {
    ++evaluated;
    // Per node: every subset of the trailers whose last leg starts there.
    double obj = 0.0;
    std::size_t trailers = 0;
    bool feasible = true;
    std::vector<char> active(n, 0);
    for (std::size_t l = 0; l < n; ++l) obj += instance.paths[l][choice[l]].detour_cost;
    for (std::size_t node = 0; node < instance.nodes.size() && feasible; ++node) {
      std::vector<std::size_t> members;
      double demand = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        if (instance.oll[l][choice[l]] == node) {
          members.push_back(l);
          demand += instance.loads[l].volume;
        }
      }
      double node_best = kInf;
      std::size_t node_count = 0;
      std::uint32_t node_mask = 0;
      const std::uint32_t subsets = 1u << members.size();
      for (std::uint32_t mask = 0; mask < subsets; ++mask) {
        double c = 0.0, q = 0.0;
        std::size_t k = 0;
        for (std::size_t b = 0; b < members.size(); ++b) {
          if (mask & (1u << b)) {
            const std::size_t l = members[b];
            c += instance.paths[l][choice[l]].last_leg_cost;
            q += instance.loads[l].capacity;
            ++k;
          }
        }
        if (instance.constrained[node] && q < demand - kVolumeTol) continue;
        bool take = node_best == kInf || c < node_best - tie_eps(node_best);
        if (!take && std::fabs(c - node_best) <= tie_eps(node_best)) {
          if (k != node_count) {
            take = k < node_count;
          } else {
            // Lexicographically smaller set of load indices.
            for (std::size_t b = 0; b < members.size(); ++b) {
              const bool in_new = mask & (1u << b);
              const bool in_old = node_mask & (1u << b);
              if (in_new != in_old) {
                take = in_new;
                break;
              }
            }
          }
        }
        if (take) {
          node_best = c;
          node_count = k;
          node_mask = mask;
        }
      }
      if (node_best == kInf) {
        feasible = false;
        break;
      }
      obj += node_best;
      trailers += node_count;
      for (std::size_t b = 0; b < members.size(); ++b) {
        if (node_mask & (1u << b)) active[members[b]] = 1;
      }
    }
    if (feasible) {
      const bool better = best_choice.empty() || obj < best_obj - tie_eps(best_obj) ||
                          (std::fabs(obj - best_obj) <= tie_eps(best_obj) && trailers < best_trailers);
      if (better) {
        best_obj = obj;
        best_trailers = trailers;
        best_choice = choice;
        best_active = active;
      }
    }
    // Odometer: last load varies fastest, so choices are visited in lexicographic order.
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++choice[pos] < instance.paths[pos].size()) break;
      choice[pos] = 0;
      if (pos == 0) {
        pos = n + 1;
        break;
      }
    }
    if (n == 0 || pos == n + 1) break;
  }

  Plan plan = make_plan(instance, best_choice.empty() ? std::vector<std::size_t>(n, 0) : best_choice,
                        best_active.empty() ? std::vector<char>(n, 0) : best_active);
  plan.optimal = true;
  plan.stats.nodes = evaluated;
  plan.stats.components = 1;
  plan.stats.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return plan;
}

std::vector<PlanViolation> verify_plan(const Instance& instance, const Plan& plan) {
  std::vector<PlanViolation> out;
  const std::size_t n = instance.loads.size();
  std::vector<int> routed(n, 0);
  std::vector<double> demand(instance.nodes.size(), 0.0), capacity(instance.nodes.size(), 0.0);
  bool indexed = true;

  for (const auto& a : plan.assignments) {
    if (a.load >= n || a.path >= instance.paths[a.load].size()) {
      out.push_back({"path-index", "assignment references a nonexistent load or path"});
      indexed = false;
      continue;
    }
    const auto& id = instance.loads[a.load].id;
    if (a.active && !a.routed) {
      out.push_back({"trailer-without-route", "load " + id + " activates a trailer on a path it does not take"});
    }
    const std::size_t node = instance.oll[a.load][a.path];
    if (a.routed) {
      ++routed[a.load];
      demand[node] += instance.loads[a.load].volume;
    }
    if (a.active) capacity[node] += instance.loads[a.load].capacity;
  }
  for (std::size_t l = 0; l < n; ++l) {
    if (routed[l] != 1) {
      out.push_back({"one-path", "load " + instance.loads[l].id + " is routed on " + std::to_string(routed[l]) +
                                     " paths"});
    }
  }
  for (std::size_t node = 0; node < instance.nodes.size(); ++node) {
    if (!instance.constrained[node]) continue;
    if (!covered(capacity[node], demand[node])) {
      out.push_back({"capacity", "hub " + to_string(instance.nodes[node]) + " short by " +
                                     std::to_string(demand[node] - capacity[node])});
    }
  }
  if (!indexed) return out;
  const double recomputed = objective_of(instance, plan);
  if (std::fabs(recomputed - plan.objective) > 1e-6 * std::max(1.0, std::fabs(recomputed))) {
    out.push_back({"objective", "reported " + std::to_string(plan.objective) + ", recomputed " +
                                    std::to_string(recomputed)});
  }
  return out;
}

}  // namespace loadcons::solver
