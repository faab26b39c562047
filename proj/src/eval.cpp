#include "loadcons/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace loadcons::eval {

namespace {

std::optional<double> ratio_pct(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den * 100.0;
}

std::string cell(std::optional<double> v) {
  if (!v) return "N/A";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::tl: return "TL";
    case Method::nnch: return "NNCH";
    case Method::spot: return "SPOT";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "TL" || name == "tl") return Method::tl;
  if (name == "NNCH" || name == "nnch") return Method::nnch;
  if (name == "SPOT" || name == "spot") return Method::spot;
  throw ConfigError("unknown method '" + name + "'");
}

Normalize parse_normalize(const std::string& name) {
  if (name == "within") return Normalize::within;
  if (name == "cross-tier") return Normalize::cross_tier;
  throw ConfigError("normalize must be 'within' or 'cross-tier', got '" + name + "'");
}

std::string to_string(Normalize n) { return n == Normalize::within ? "within" : "cross-tier"; }

std::string to_string(Metric m) {
  switch (m) {
    case Metric::travel_distance_pct: return "travel_distance_pct";
    case Metric::cost_reduction_pct: return "cost_reduction_pct";
    case Metric::loads_cut_pct: return "loads_cut_pct";
    case Metric::coverage_pct: return "coverage_pct";
    case Metric::cp_ratio_pct: return "cp_ratio_pct";
    case Metric::daily_loads_per_cp: return "daily_loads_per_cp";
    case Metric::path_freq_pct: return "path_freq_pct";
    case Metric::num_paths_pct: return "num_paths_pct";
  }
  return "?";
}

DistanceCost distance_and_cost(const solver::Plan& plan, const solver::Instance& instance) {
  const auto violations = solver::verify_plan(instance, plan);
  if (!violations.empty()) {
    throw ContractViolation("infeasible plan: " + violations.front().constraint + ": " + violations.front().detail);
  }
  DistanceCost dc;
  for (const auto& a : plan.assignments) {
    const auto& p = instance.paths[a.load][a.path];
    if (a.routed) dc.miles += p.detour_miles;
    if (a.active) dc.miles += p.last_leg_miles;
  }
  dc.cost = solver::objective_of(instance, plan);
  return dc;
}

TrainingIndex::TrainingIndex(mining::TransactionGroups groups) : groups_(std::move(groups)) {}

std::optional<double> TrainingIndex::cooccurrence(const mining::GroupKey& group, const mining::AbstractPoint& a,
                                                  const mining::AbstractPoint& b) const {
  const auto it = groups_.find(group);
  if (it == groups_.end() || it->second.empty()) return std::nullopt;
  std::size_t both = 0;
  for (const auto& t : it->second) {
    if (std::binary_search(t.begin(), t.end(), a) && std::binary_search(t.begin(), t.end(), b)) ++both;
  }
  return static_cast<double>(both) / static_cast<double>(it->second.size());
}

DayMetrics evaluate_plan(const InstanceInfo& info, const solver::Instance& instance, const solver::Plan& plan,
                         Method method, const TrainingIndex& training) {
  if (info.loads.size() != instance.loads.size()) {
    throw ContractViolation("instance info and solver instance disagree on the load count");
  }
  DayMetrics m;
  m.destination = info.destination;
  m.due_day = info.due_day;
  m.tier = info.tier;
  m.method = method;
  m.partial_loads = instance.loads.size();
  m.optimal = plan.optimal;

  const DistanceCost dc = distance_and_cost(plan, instance);
  m.miles = dc.miles;
  m.cost = dc.cost;
  for (const auto& paths : instance.paths) {
    m.tl_miles += paths.front().last_leg_miles;
    m.tl_cost += paths.front().last_leg_cost;
  }

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < info.loads.size(); ++i) index[info.loads[i].id] = i;

  std::set<std::size_t> covered;
  std::set<Node> hubs, origins;
  std::vector<double> freqs;
  for (const auto& l : info.loads) origins.insert(l.origin);
  for (const auto& a : plan.assignments) {
    const auto& p = instance.paths[a.load][a.path];
    if (a.routed && !a.active) ++m.loads_cut;
    if (!a.routed || p.kind != pathgen::PathKind::consolidation) continue;
    covered.insert(a.load);
    hubs.insert(p.last_leg_origin);
    const auto h = index.find(p.hub_load_id);
    if (h == index.end()) continue;
    covered.insert(h->second);
    const auto& rider = info.loads[a.load];
    const auto& hub_load = info.loads[h->second];
    const mining::GroupKey group{rider.destination, day_of_week(rider.due_day)};
    if (const auto f = training.cooccurrence(group, mining::abstract_load(rider), mining::abstract_load(hub_load))) {
      freqs.push_back(*f);
    }
  }
  m.covered = covered.size();
  m.hubs_used = hubs.size();

  const auto n = static_cast<double>(m.partial_loads);
  m.set(Metric::travel_distance_pct, ratio_pct(m.miles, m.tl_miles));
  if (m.tl_cost != 0.0) m.set(Metric::cost_reduction_pct, (m.tl_cost - m.cost) / m.tl_cost * 100.0);
  m.set(Metric::loads_cut_pct, ratio_pct(static_cast<double>(m.loads_cut), n));
  m.set(Metric::coverage_pct, ratio_pct(static_cast<double>(m.covered), n));
  m.set(Metric::cp_ratio_pct, ratio_pct(static_cast<double>(m.hubs_used), static_cast<double>(origins.size())));
  if (m.hubs_used > 0) {
    m.set(Metric::daily_loads_per_cp, static_cast<double>(m.covered) / static_cast<double>(m.hubs_used));
  }
  if (!freqs.empty()) {
    double s = 0.0;
    for (double f : freqs) s += f;
    m.set(Metric::path_freq_pct, s / static_cast<double>(freqs.size()) * 100.0);
  }
  m.set(Metric::num_paths_pct,
        ratio_pct(static_cast<double>(info.filtered_paths), static_cast<double>(info.unfiltered_paths)));
  return m;
}

std::optional<double> Report::mean(const std::string& tier, Method method, Metric metric) const {
  for (const auto& r : rows) {
    if (r.tier == tier && r.method == method) return r.mean(metric);
  }
  return std::nullopt;
}

Report compare_report(std::vector<DayMetrics> days, Normalize normalize, nlohmann::ordered_json config,
                      const std::string& reference_tier) {
  auto key = [](const DayMetrics& d) { return std::tie(d.destination, d.due_day, d.method); };
  std::sort(days.begin(), days.end(), [&](const DayMetrics& a, const DayMetrics& b) { return key(a) < key(b); });

  // Every destination-day needs one row per method.
  std::map<std::pair<Node, std::int64_t>, std::set<Method>> seen;
  std::set<Method> methods;
  for (const auto& d : days) {
    if (!seen[{d.destination, d.due_day}].insert(d.method).second) {
      throw DataError("duplicate " + to_string(d.method) + " result for " + to_string(d.destination) + " day " +
                      std::to_string(d.due_day));
    }
    methods.insert(d.method);
  }
  for (const auto& [k, ms] : seen) {
    if (ms != methods) {
      throw DataError("instance " + to_string(k.first) + " day " + std::to_string(k.second) +
                      " lacks results for some methods");
    }
  }

  if (normalize == Normalize::cross_tier) {
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& d : days) {
      if (d.tier == reference_tier && d.method == Method::tl) {
        total += d.tl_miles;
        ++count;
      }
    }
    if (count == 0) throw ConfigError("reference tier '" + reference_tier + "' has no instances");
    const double ref = total / static_cast<double>(count);
    for (auto& d : days) d.set(Metric::travel_distance_pct, ratio_pct(d.miles, ref));
  }

  Report r;
  r.config = std::move(config);
  r.normalize = normalize;

  std::set<std::string> tier_names;
  for (const auto& d : days) tier_names.insert(d.tier);
  std::vector<std::string> tiers(tier_names.begin(), tier_names.end());
  if (tiers.size() != 1 || tiers.front() != "all") tiers.push_back("all");
  for (const auto& tier : tiers) {
    for (Method method : methods) {
      AggregateRow row;
      row.tier = tier;
      row.method = method;
      std::array<double, kMetrics.size()> sums{};
      std::array<std::size_t, kMetrics.size()> counts{};
      for (const auto& d : days) {
        if (d.method != method || (tier != "all" && d.tier != tier)) continue;
        ++row.instances;
        for (std::size_t k = 0; k < kMetrics.size(); ++k) {
          if (d.values[k]) {
            sums[k] += *d.values[k];
            ++counts[k];
          }
        }
      }
      for (std::size_t k = 0; k < kMetrics.size(); ++k) {
        if (counts[k] > 0) row.means[k] = sums[k] / static_cast<double>(counts[k]);
      }
      r.rows.push_back(row);
    }
  }
  r.days = std::move(days);
  return r;
}

std::string Report::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = config;
  j["normalize"] = to_string(normalize);
  j["definitions"] = {
      {"loads_cut_pct", "partial loads whose trailer is switched off / partial loads"},
      {"coverage_pct", "partial loads riding a consolidation path plus their hub loads / partial loads"},
      {"cp_ratio_pct", "hub nodes used / distinct origin nodes of partial loads"},
      {"daily_loads_per_cp", "loads covered at hubs (hub loads included) / hub nodes used"},
      {"path_freq_pct",
       "mean over chosen consolidation routes of the share of training transactions of the same destination "
       "and weekday containing both the rider's and the hub load's items"},
      {"num_paths_pct", "consolidation paths through mined hubs / all time-feasible consolidation paths"},
  };
  auto values = [](const auto& arr) {
    nlohmann::ordered_json o;
    for (std::size_t k = 0; k < kMetrics.size(); ++k) {
      o[to_string(kMetrics[k])] = arr[k] ? nlohmann::ordered_json(*arr[k]) : nlohmann::ordered_json(nullptr);
    }
    return o;
  };
  auto& agg = j["aggregates"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json o;
    o["tier"] = row.tier;
    o["method"] = to_string(row.method);
    o["instances"] = row.instances;
    o["metrics"] = values(row.means);
    agg.push_back(std::move(o));
  }
  auto& inst = j["instances"] = nlohmann::ordered_json::array();
  for (const auto& d : days) {
    nlohmann::ordered_json o;
    o["destination"] = to_string(d.destination);
    o["due_day"] = d.due_day;
    o["tier"] = d.tier;
    o["method"] = to_string(d.method);
    o["partial_loads"] = d.partial_loads;
    o["miles"] = d.miles;
    o["cost"] = d.cost;
    o["tl_miles"] = d.tl_miles;
    o["tl_cost"] = d.tl_cost;
    o["loads_cut"] = d.loads_cut;
    o["covered"] = d.covered;
    o["hubs_used"] = d.hubs_used;
    o["optimal"] = d.optimal;
    o["metrics"] = values(d.values);
    inst.push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

std::string Report::to_text() const {
  const std::vector<std::string> head{"Tier", "Method", "N", "Travel Distance (%)", "Cost Reduction (%)",
                                      "Loads Cut (%)", "Coverage (%)", "CP Ratio (%)", "Loads/CP", "Path Freq (%)",
                                      "Num Paths (%)"};
  std::vector<std::vector<std::string>> table{head};
  // Best cost reduction per tier gets a marker.
  std::map<std::string, double> best;
  for (const auto& r : rows) {
    if (const auto v = r.mean(Metric::cost_reduction_pct)) {
      auto [it, fresh] = best.emplace(r.tier, *v);
      if (!fresh) it->second = std::max(it->second, *v);
    }
  }
  for (const auto& r : rows) {
    std::vector<std::string> line{r.tier, to_string(r.method), std::to_string(r.instances)};
    for (Metric m : kMetrics) {
      std::string c = cell(r.mean(m));
      if (m == Metric::cost_reduction_pct && r.mean(m) && best.count(r.tier) && *r.mean(m) == best.at(r.tier) &&
          r.method != Method::tl) {
        c += " *";
      }
      line.push_back(c);
    }
    table.push_back(std::move(line));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : table) {
    for (std::size_t k = 0; k < line.size(); ++k) width[k] = std::max(width[k], line[k].size());
  }
  std::ostringstream out;
  out << "normalize: " << to_string(normalize) << "; * marks the best cost reduction in a tier\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t k = 0; k < table[i].size(); ++k) {
      if (k > 0) out << "  ";
      const auto& c = table[i][k];
      if (k < 2) {
        out << c << std::string(width[k] - c.size(), ' ');
      } else {
        out << std::string(width[k] - c.size(), ' ') << c;
      }
    }
    out << "\n";
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out << std::string(total - 2, '-') << "\n";
    }
  }
  return out.str();
}

}  // namespace loadcons::eval
