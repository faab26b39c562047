#include "loadcons/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "loadcons/baseline.hpp"
#include "loadcons/datagen.hpp"
#include "loadcons/io.hpp"

namespace loadcons::pipeline {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

Node parse_node(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) throw DataError("expected '<terminal>/<sort>', got '" + text + "'");
  return {text.substr(0, slash), text.substr(slash + 1)};
}

std::string where(const Node& destination, std::int64_t due_day) {
  return to_string(destination) + " day " + std::to_string(due_day);
}

ojson item_json(const mining::AbstractPoint& p) {
  ojson j;
  j["terminal"] = p.origin.terminal;
  j["sort"] = p.origin.sort;
  j["due_dow"] = p.due_dow;
  j["transit_days"] = p.transit_days;
  return j;
}

mining::AbstractPoint item_from_json(const json& j) {
  return {Node{j.at("terminal").get<std::string>(), j.at("sort").get<std::string>()}, j.at("due_dow").get<int>(),
          j.at("transit_days").get<int>()};
}

ojson path_json(const pathgen::Path& p) {
  ojson j;
  j["kind"] = pathgen::to_string(p.kind);
  j["hub"] = p.hub ? ojson(to_string(*p.hub)) : ojson(nullptr);
  j["last_leg_origin"] = to_string(p.last_leg_origin);
  j["hub_load"] = p.hub_load_id;
  j["detour_cost"] = p.detour_cost;
  j["last_leg_cost"] = p.last_leg_cost;
  j["detour_miles"] = p.detour_miles;
  j["last_leg_miles"] = p.last_leg_miles;
  j["detour_minutes"] = p.detour_minutes;
  return j;
}

pathgen::Path path_from_json(const json& j, const std::string& load_id) {
  pathgen::Path p;
  p.load_id = load_id;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "direct") {
    p.kind = pathgen::PathKind::direct;
  } else if (kind == "consolidation") {
    p.kind = pathgen::PathKind::consolidation;
  } else {
    throw DataError("unknown path kind '" + kind + "'");
  }
  if (!j.at("hub").is_null()) p.hub = parse_node(j.at("hub").get<std::string>());
  p.last_leg_origin = parse_node(j.at("last_leg_origin").get<std::string>());
  p.hub_load_id = j.at("hub_load").get<std::string>();
  p.detour_cost = j.at("detour_cost").get<double>();
  p.last_leg_cost = j.at("last_leg_cost").get<double>();
  p.detour_miles = j.at("detour_miles").get<double>();
  p.last_leg_miles = j.at("last_leg_miles").get<double>();
  p.detour_minutes = j.at("detour_minutes").get<double>();
  return p;
}

std::vector<json> read_jsonl(const std::filesystem::path& file) {
  std::istringstream in(io::read_file(file));
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// Runs body(i) for i in [0, n) on an OpenMP team; the first exception (by
// index) is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t n, int jobs, Body body) {
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(eps > 0.0 && eps <= std::numbers::pi)) throw ConfigError("eps must lie in (0, pi] radians");
  if (min_pts < 2) throw ConfigError("min_pts must be at least 2");
  (void)support();
  if (!(speed_mph > 0.0)) throw ConfigError("speed_mph must be positive");
  if (!(earth_radius_miles > 0.0)) throw ConfigError("earth_radius_miles must be positive");
  (void)geo::parse_reference(reference_direction);
  if (!(dwell_minutes >= 0.0)) throw ConfigError("dwell_minutes must be nonnegative");
  for (const auto& [type, rate] : rates) {
    if (!(rate >= 0.0)) throw ConfigError("rate for '" + type + "' must be nonnegative");
  }
  if (!(default_rate >= 0.0)) throw ConfigError("default_rate must be nonnegative");
  if (!(fixed_dispatch >= 0.0)) throw ConfigError("fixed_dispatch must be nonnegative");
  if (!(partial_threshold > 0.0 && partial_threshold <= 1.0)) {
    throw ConfigError("partial_threshold must lie in (0, 1]");
  }
  (void)solver::parse_capacity_scope(capacity_scope);
  (void)eval::parse_normalize(normalize);
  if (budget_nodes < 1) throw ConfigError("budget_nodes must be positive");
  if (!(budget_secs > 0.0)) throw ConfigError("budget_secs must be positive");
  if (jobs < 1 || jobs > 1024) throw ConfigError("jobs must lie in [1, 1024]");
  if (test_weeks < 0) throw ConfigError("test_weeks must be nonnegative");
}

geo::GeoConfig PipelineConfig::geo() const {
  return {speed_mph, earth_radius_miles, geo::parse_reference(reference_direction)};
}

pathgen::PathGenConfig PipelineConfig::pathgen() const {
  pathgen::PathGenConfig c;
  c.dwell_minutes = dwell_minutes;
  c.costs.rates = rates;
  c.costs.default_rate = default_rate;
  c.costs.fixed_dispatch = fixed_dispatch;
  c.require_comembership = require_comembership;
  return c;
}

mining::MinSupport PipelineConfig::support() const { return mining::MinSupport::parse(min_sup); }

solver::Budget PipelineConfig::budget() const { return {budget_nodes, budget_secs}; }

ojson PipelineConfig::echo() const {
  ojson j;
  j["eps"] = eps;
  j["min_pts"] = min_pts;
  j["min_sup"] = min_sup;
  j["maximal"] = maximal;
  j["speed_mph"] = speed_mph;
  j["earth_radius_miles"] = earth_radius_miles;
  j["reference_direction"] = reference_direction;
  j["dwell_minutes"] = dwell_minutes;
  j["rates"] = rates;
  j["default_rate"] = default_rate;
  j["fixed_dispatch"] = fixed_dispatch;
  j["require_comembership"] = require_comembership;
  j["partial_threshold"] = partial_threshold;
  j["capacity_scope"] = capacity_scope;
  j["normalize"] = normalize;
  j["reference_tier"] = reference_tier;
  j["budget_nodes"] = budget_nodes;
  j["budget_secs"] = budget_secs;
  j["seed"] = seed;
  j["test_weeks"] = test_weeks;
  j["weekdays_only"] = weekdays_only;
  return j;
}

PipelineConfig parse_pipeline_config(const std::string& json_text, PipelineConfig c) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("pipeline config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "eps") c.eps = v.get<double>();
      else if (key == "min_pts") c.min_pts = v.get<int>();
      else if (key == "min_sup") c.min_sup = v.is_string() ? v.get<std::string>() : v.dump();
      else if (key == "maximal") c.maximal = v.get<bool>();
      else if (key == "speed_mph") c.speed_mph = v.get<double>();
      else if (key == "earth_radius_miles") c.earth_radius_miles = v.get<double>();
      else if (key == "reference_direction") c.reference_direction = v.get<std::string>();
      else if (key == "dwell_minutes") c.dwell_minutes = v.get<double>();
      else if (key == "rates") c.rates = v.get<std::map<std::string, double>>();
      else if (key == "default_rate") c.default_rate = v.get<double>();
      else if (key == "fixed_dispatch") c.fixed_dispatch = v.get<double>();
      else if (key == "require_comembership") c.require_comembership = v.get<bool>();
      else if (key == "partial_threshold") c.partial_threshold = v.get<double>();
      else if (key == "capacity_scope") c.capacity_scope = v.get<std::string>();
      else if (key == "normalize") c.normalize = v.get<std::string>();
      else if (key == "reference_tier") c.reference_tier = v.get<std::string>();
      else if (key == "budget_nodes") c.budget_nodes = v.get<std::uint64_t>();
      else if (key == "budget_secs") c.budget_secs = v.get<double>();
      else if (key == "jobs") c.jobs = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "test_weeks") c.test_weeks = v.get<int>();
      else if (key == "weekdays_only") c.weekdays_only = v.get<bool>();
      else throw ConfigError("pipeline config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("pipeline config: ") + e.what());
  }
  c.validate();
  return c;
}

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {}

void EventLog::event(const std::string& stage, ojson fields) {
  ojson j;
  j["stage"] = stage;
  for (auto& [k, v] : fields.items()) j[k] = v;
  lines_.push_back(j.dump());
  if (path_) flush();
}

void EventLog::flush() const {
  if (!path_) return;
  std::string s;
  for (const auto& l : lines_) s += l + "\n";
  io::write_file_atomic(*path_, s);
}

ojson Provenance::to_json() const {
  ojson j;
  j["split"] = split;
  j["first_day"] = first_day;
  j["last_day"] = last_day;
  return j;
}

Provenance Provenance::from_json(const json& j) {
  return {j.at("split").get<std::string>(), j.at("first_day").get<std::int64_t>(),
          j.at("last_day").get<std::int64_t>()};
}

Provenance Provenance::of(const std::string& split, const std::vector<Load>& loads) {
  Provenance p{split, 0, -1};
  for (std::size_t i = 0; i < loads.size(); ++i) {
    if (i == 0) {
      p.first_day = p.last_day = loads[i].due_day;
    } else {
      p.first_day = std::min(p.first_day, loads[i].due_day);
      p.last_day = std::max(p.last_day, loads[i].due_day);
    }
  }
  return p;
}

std::vector<Load> partial_loads(const std::vector<Load>& loads, double threshold) {
  std::vector<Load> out;
  for (const auto& l : loads) {
    if (is_partial(l, threshold)) out.push_back(l);
  }
  return out;
}

std::vector<mining::CandidateSet> Tactical::candidates() const {
  std::vector<mining::CandidateSet> out;
  for (const auto& [group, result] : mined) out.insert(out.end(), result.candidates.begin(), result.candidates.end());
  return out;
}

std::vector<mining::CandidateSet> Tactical::candidates(const mining::GroupKey& group) const {
  const auto it = mined.find(group);
  return it == mined.end() ? std::vector<mining::CandidateSet>{} : it->second.candidates;
}

Tactical run_clustering(const Network& network, const std::vector<Load>& history, const PipelineConfig& config,
                        const std::string& split) {
  Tactical t;
  t.provenance = Provenance::of(split, history);
  auto points = cluster::build_event_points(partial_loads(history, config.partial_threshold), network,
                                            geo::parse_reference(config.reference_direction));
  t.skipped = std::move(points.skipped);
  t.clusters = cluster::st_dbscan_parallel(points.points, {config.eps, config.min_pts}, config.jobs);
  t.transactions = mining::abstract_clusters(t.clusters.clusters, network);
  return t;
}

void run_mining(Tactical& tactical, const Network& network, const PipelineConfig& config) {
  mining::MiningOptions options;
  options.maximal_only = config.maximal;
  const auto ctx = mining::network_time_context(network, config.geo());
  tactical.mined = mining::mine_groups(tactical.transactions, config.support(), ctx, options, config.jobs);
}

std::string clusters_jsonl(const cluster::ClusterResult& clusters) {
  std::string s;
  for (const auto& c : clusters.clusters) {
    ojson j;
    j["destination"] = to_string(c.destination);
    j["due_day"] = c.due_day;
    auto& m = j["members"] = ojson::array();
    for (const auto& p : c.members) m.push_back(p.load_id);
    s += j.dump() + "\n";
  }
  return s;
}

std::string transactions_jsonl(const mining::TransactionGroups& groups, const Provenance& p) {
  std::string s;
  for (const auto& [group, transactions] : groups) {
    for (const auto& t : transactions) {
      ojson j;
      j["provenance"] = p.to_json();
      j["destination"] = to_string(group.destination);
      j["due_dow"] = group.due_dow;
      auto& items = j["items"] = ojson::array();
      for (const auto& item : t) items.push_back(item_json(item));
      s += j.dump() + "\n";
    }
  }
  return s;
}

std::string candidates_jsonl(const std::vector<mining::CandidateSet>& candidates, const Provenance& p) {
  std::string s;
  for (const auto& c : candidates) {
    ojson j;
    j["provenance"] = p.to_json();
    j["destination"] = to_string(c.group.destination);
    j["due_dow"] = c.group.due_dow;
    auto& items = j["items"] = ojson::array();
    for (const auto& item : c.items) items.push_back(item_json(item));
    j["support"] = c.support_count;
    auto& cps = j["consolidation_points"] = ojson::array();
    for (const auto& n : c.consolidation_points) cps.push_back(to_string(n));
    s += j.dump() + "\n";
  }
  return s;
}

std::string cps_json(const std::vector<mining::CandidateSet>& candidates, const Provenance& p) {
  std::map<mining::GroupKey, std::vector<mining::CandidateSet>> by_group;
  for (const auto& c : candidates) by_group[c.group].push_back(c);
  ojson j;
  j["provenance"] = p.to_json();
  auto& groups = j["groups"] = ojson::array();
  for (const auto& [group, cs] : by_group) {
    ojson g;
    g["destination"] = to_string(group.destination);
    g["due_dow"] = group.due_dow;
    auto& h = g["consolidation_points"] = ojson::array();
    for (const auto& n : mining::union_cp(cs)) h.push_back(to_string(n));
    groups.push_back(std::move(g));
  }
  return j.dump(2) + "\n";
}

MinedArtifacts read_mined(const std::filesystem::path& candidates_file) {
  MinedArtifacts m;
  m.provenance = {"train", 0, -1};
  bool have_provenance = false;
  auto note = [&](const json& j) {
    const auto p = Provenance::from_json(j.at("provenance"));
    if (!have_provenance) {
      m.provenance = p;
      have_provenance = true;
    } else if (p.split != m.provenance.split || p.first_day != m.provenance.first_day ||
               p.last_day != m.provenance.last_day) {
      throw DataError("mixed provenance in mining artifacts");
    }
  };
  try {
    for (const auto& j : read_jsonl(candidates_file)) {
      note(j);
      mining::CandidateSet c;
      c.group = {parse_node(j.at("destination").get<std::string>()), j.at("due_dow").get<int>()};
      for (const auto& item : j.at("items")) c.items.push_back(item_from_json(item));
      std::sort(c.items.begin(), c.items.end());
      c.support_count = j.at("support").get<int>();
      for (const auto& n : j.at("consolidation_points")) c.consolidation_points.insert(parse_node(n.get<std::string>()));
      m.candidates.push_back(std::move(c));
    }
    const auto tx_file = candidates_file.parent_path() / "transactions.jsonl";
    if (std::filesystem::exists(tx_file)) {
      for (const auto& j : read_jsonl(tx_file)) {
        note(j);
        mining::GroupKey g{parse_node(j.at("destination").get<std::string>()), j.at("due_dow").get<int>()};
        mining::Transaction t;
        for (const auto& item : j.at("items")) t.push_back(item_from_json(item));
        std::sort(t.begin(), t.end());
        m.transactions[g].push_back(std::move(t));
      }
    }
  } catch (const json::exception& e) {
    throw DataError(candidates_file.string() + ": " + e.what());
  }
  return m;
}

std::string day_instance_json(const DayInstance& d) {
  ojson j;
  j["destination"] = to_string(d.info.destination);
  j["due_day"] = d.info.due_day;
  j["tier"] = d.info.tier;
  j["provenance"] = d.provenance.to_json();
  auto& hubs = j["hubs"] = ojson::array();
  for (const auto& h : d.hubs) hubs.push_back(to_string(h));
  j["filtered_paths"] = d.info.filtered_paths;
  j["unfiltered_paths"] = d.info.unfiltered_paths;
  auto& loads = j["loads"] = ojson::array();
  for (std::size_t i = 0; i < d.info.loads.size(); ++i) {
    ojson l = io::load_to_json(d.info.loads[i]);
    auto& paths = l["paths"] = ojson::array();
    for (const auto& p : d.instance.paths[i]) paths.push_back(path_json(p));
    loads.push_back(std::move(l));
  }
  return j.dump();
}

DayInstance day_instance_from_json(const json& j, solver::CapacityScope scope) {
  DayInstance d;
  d.info.destination = parse_node(j.at("destination").get<std::string>());
  d.info.due_day = j.at("due_day").get<std::int64_t>();
  d.info.tier = j.at("tier").get<std::string>();
  d.provenance = Provenance::from_json(j.at("provenance"));
  for (const auto& h : j.at("hubs")) d.hubs.push_back(parse_node(h.get<std::string>()));
  d.info.filtered_paths = j.at("filtered_paths").get<std::size_t>();
  d.info.unfiltered_paths = j.at("unfiltered_paths").get<std::size_t>();
  std::vector<solver::InstanceLoad> il;
  std::vector<std::vector<pathgen::Path>> paths;
  for (const auto& lj : j.at("loads")) {
    Load l = io::load_from_json(lj);
    il.push_back({l.id, l.volume, l.capacity, l.departure});
    std::vector<pathgen::Path> ps;
    for (const auto& pj : lj.at("paths")) ps.push_back(path_from_json(pj, l.id));
    paths.push_back(std::move(ps));
    d.info.loads.push_back(std::move(l));
  }
  std::sort(d.info.loads.begin(), d.info.loads.end(), [](const Load& a, const Load& b) { return a.id < b.id; });
  d.instance = solver::build_instance(std::move(il), std::move(paths), scope,
                                      std::set<Node>(d.hubs.begin(), d.hubs.end()));
  return d;
}

std::vector<DayInstance> read_day_instances(const std::filesystem::path& paths_file, solver::CapacityScope scope) {
  std::vector<DayInstance> out;
  std::size_t lineno = 0;
  for (const auto& j : read_jsonl(paths_file)) {
    ++lineno;
    try {
      out.push_back(day_instance_from_json(j, scope));
    } catch (const json::exception& e) {
      throw DataError(paths_file.string() + ": record " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

DayInstance build_day(const Node& destination, std::int64_t due_day, const std::string& tier,
                      std::vector<Load> partials, const std::vector<mining::CandidateSet>& group_candidates,
                      const Network& network, const PipelineConfig& config, const Provenance& provenance) {
  std::sort(partials.begin(), partials.end(), [](const Load& a, const Load& b) { return a.id < b.id; });
  const auto travel = geo::network_travel(network, config.geo());
  const auto distance = geo::network_distance(network, config.geo());
  const auto pg = config.pathgen();
  const auto hubs = mining::union_cp(group_candidates);

  DayInstance d;
  d.info.destination = destination;
  d.info.due_day = due_day;
  d.info.tier = tier;
  d.provenance = provenance;
  d.hubs.assign(hubs.begin(), hubs.end());

  const auto lc = pathgen::select_lc(partials, group_candidates);
  const auto paths = pathgen::generate_paths(lc, hubs, group_candidates, travel, distance, pg);
  d.info.filtered_paths = paths.consolidation_paths();
  d.info.unfiltered_paths = pathgen::generate_paths_unfiltered(partials, travel, distance, pg).consolidation_paths();
  d.instance = solver::make_instance(partials, paths, distance, pg.costs,
                                     solver::parse_capacity_scope(config.capacity_scope), hubs);
  d.info.loads = std::move(partials);
  return d;
}

std::vector<DayInstance> build_days(const std::vector<Load>& test_loads, const Tactical& tactical,
                                    const std::map<Node, std::string>& tiers, const Network& network,
                                    const PipelineConfig& config, const Provenance& provenance) {
  std::map<std::pair<Node, std::int64_t>, std::vector<Load>> groups;
  for (const auto& l : partial_loads(test_loads, config.partial_threshold)) {
    if (config.weekdays_only && day_of_week(l.due_day) >= 5) continue;
    groups[{l.destination, l.due_day}].push_back(l);
  }
  std::vector<std::pair<Node, std::int64_t>> keys;
  for (const auto& [k, v] : groups) keys.push_back(k);
  std::vector<DayInstance> out(keys.size());
  parallel_for(keys.size(), config.jobs, [&](std::size_t i) {
    const auto& [dest, day] = keys[i];
    std::string tier = "all";
    if (!tiers.empty()) {
      const auto it = tiers.find(dest);
      tier = it == tiers.end() ? "untiered" : it->second;
    }
    try {
      out[i] = build_day(dest, day, tier, groups.at(keys[i]), tactical.candidates({dest, day_of_week(day)}), network,
                         config, provenance);
    } catch (const std::exception& e) {
      throw DataError("stage paths, " + where(dest, day) + ": " + e.what());
    }
  });
  return out;
}

DayPlans plan_day(const DayInstance& day, const PipelineConfig& config) {
  DayPlans p;
  p.tl = baseline::plan_tl(day.instance);
  p.nnch = baseline::plan_nnch(day.instance);
  p.spot = solver::solve_exact(day.instance, config.budget(), {p.tl, p.nnch});
  const std::pair<const char*, const solver::Plan*> all[] = {{"TL", &p.tl}, {"NNCH", &p.nnch}, {"SPOT", &p.spot}};
  for (const auto& [name, plan] : all) {
    const auto v = solver::verify_plan(day.instance, *plan);
    if (!v.empty()) {
      throw ContractViolation(std::string(name) + " plan violates " + v.front().constraint + ": " + v.front().detail);
    }
  }
  return p;
}

std::string plan_jsonl(const std::vector<DayInstance>& days, const std::vector<solver::Plan>& plans) {
  std::string s;
  for (std::size_t d = 0; d < days.size(); ++d) {
    const auto& day = days[d];
    for (const auto& a : plans[d].assignments) {
      const auto& p = day.instance.paths[a.load][a.path];
      ojson j;
      j["destination"] = to_string(day.info.destination);
      j["due_day"] = day.info.due_day;
      j["load"] = day.instance.loads[a.load].id;
      j["path"] = a.path;
      j["kind"] = pathgen::to_string(p.kind);
      j["hub"] = p.hub ? ojson(to_string(*p.hub)) : ojson(nullptr);
      j["hub_load"] = p.hub_load_id;
      j["routed"] = a.routed;
      j["active"] = a.active;
      s += j.dump() + "\n";
    }
  }
  return s;
}

std::string plan_summary_json(const std::vector<DayInstance>& days, const std::vector<solver::Plan>& plans,
                              const std::string& solver_name) {
  ojson j;
  j["solver"] = solver_name;
  auto& rows = j["instances"] = ojson::array();
  for (std::size_t d = 0; d < days.size(); ++d) {
    ojson r;
    r["destination"] = to_string(days[d].info.destination);
    r["due_day"] = days[d].info.due_day;
    r["objective"] = plans[d].objective;
    r["optimal"] = plans[d].optimal;
    r["active_trailers"] = plans[d].active_trailers();
    r["nodes"] = plans[d].stats.nodes;
    r["components"] = plans[d].stats.components;
    r["wall_ms"] = plans[d].stats.wall_ms;
    rows.push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

std::vector<solver::Plan> read_plans(const std::filesystem::path& plan_file, const std::vector<DayInstance>& days) {
  std::map<std::pair<Node, std::int64_t>, std::size_t> day_index;
  for (std::size_t d = 0; d < days.size(); ++d) day_index[{days[d].info.destination, days[d].info.due_day}] = d;
  std::vector<std::vector<solver::Assignment>> assignments(days.size());
  try {
    for (const auto& j : read_jsonl(plan_file)) {
      const auto dest = parse_node(j.at("destination").get<std::string>());
      const auto day = j.at("due_day").get<std::int64_t>();
      const auto it = day_index.find({dest, day});
      if (it == day_index.end()) throw DataError(plan_file.string() + ": no instance for " + where(dest, day));
      const auto& loads = days[it->second].instance.loads;
      const auto id = j.at("load").get<std::string>();
      const auto pos = std::find_if(loads.begin(), loads.end(), [&](const auto& l) { return l.id == id; });
      if (pos == loads.end()) throw DataError(plan_file.string() + ": unknown load " + id);
      assignments[it->second].push_back({static_cast<std::size_t>(pos - loads.begin()), j.at("path").get<std::size_t>(),
                                         j.at("routed").get<bool>(), j.at("active").get<bool>()});
    }
  } catch (const json::exception& e) {
    throw DataError(plan_file.string() + ": " + e.what());
  }
  std::map<std::pair<Node, std::int64_t>, bool> optimal;
  const auto summary = plan_file.parent_path() / "plan_summary.json";
  if (std::filesystem::exists(summary)) {
    const auto j = json::parse(io::read_file(summary));
    for (const auto& r : j.at("instances")) {
      optimal[{parse_node(r.at("destination").get<std::string>()), r.at("due_day").get<std::int64_t>()}] =
          r.at("optimal").get<bool>();
    }
  }
  std::vector<solver::Plan> out(days.size());
  for (std::size_t d = 0; d < days.size(); ++d) {
    auto& a = assignments[d];
    std::sort(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.load < y.load; });
    out[d].assignments = std::move(a);
    out[d].objective = solver::objective_of(days[d].instance, out[d]);
    const auto it = optimal.find({days[d].info.destination, days[d].info.due_day});
    out[d].optimal = it != optimal.end() && it->second;
  }
  return out;
}

OperationalResult plan_days(std::vector<DayInstance> days, const PipelineConfig& config) {
  std::vector<std::optional<DayPlans>> plans(days.size());
  std::vector<std::string> failures(days.size());
  parallel_for(days.size(), config.jobs, [&](std::size_t i) {
    try {
      plans[i] = plan_day(days[i], config);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  OperationalResult r;
  for (std::size_t i = 0; i < days.size(); ++i) {
    if (!plans[i]) {
      r.errors.push_back({"solve", where(days[i].info.destination, days[i].info.due_day), failures[i]});
      continue;
    }
    r.solve_ms.push_back(plans[i]->spot.stats.wall_ms);
    r.plans.push_back(std::move(*plans[i]));
    r.days.push_back(std::move(days[i]));
  }
  return r;
}

eval::Report evaluate_days(const std::vector<DayInstance>& days, const std::vector<solver::Plan>& tl,
                           const std::vector<solver::Plan>& nnch, const std::vector<solver::Plan>& spot,
                           const mining::TransactionGroups& training, const PipelineConfig& config) {
  if (tl.size() != days.size() || nnch.size() != days.size() || spot.size() != days.size()) {
    throw DataError("every method needs one plan per destination-day");
  }
  const eval::TrainingIndex index(training);
  std::vector<eval::DayMetrics> metrics;
  for (std::size_t d = 0; d < days.size(); ++d) {
    const auto& day = days[d];
    metrics.push_back(eval::evaluate_plan(day.info, day.instance, tl[d], eval::Method::tl, index));
    metrics.push_back(eval::evaluate_plan(day.info, day.instance, nnch[d], eval::Method::nnch, index));
    metrics.push_back(eval::evaluate_plan(day.info, day.instance, spot[d], eval::Method::spot, index));
  }
  return eval::compare_report(std::move(metrics), eval::parse_normalize(config.normalize), config.echo(),
                              config.reference_tier);
}

int run_pipeline(const PipelineConfig& config, const PipelineOptions& options, const std::filesystem::path& out) {
  config.validate();
  std::filesystem::create_directories(out);
  EventLog log(out / "log.jsonl");
  auto t0 = Clock::now();

  Network network;
  std::map<Node, std::string> tiers;
  if (options.data_dir.empty()) {
    auto gen = options.gen_config_json.empty() ? datagen::GenConfig{}
                                               : datagen::parse_gen_config(options.gen_config_json);
    gen.seed = config.seed;
    if (options.days) gen.days = *options.days;
    auto g = datagen::generate(gen);
    datagen::write_generated(out / "data", g);
    network = std::move(g.network);
    tiers = std::move(g.tiers);
    log.event("generate", {{"loads", network.loads().size()}, {"ms", ms_since(t0)}});
  } else {
    network = io::read_network(options.data_dir);
    const auto tiers_file = options.data_dir / "tiers.csv";
    if (std::filesystem::exists(tiers_file)) {
      tiers = datagen::parse_tiers(io::read_file(tiers_file), tiers_file.string());
    }
    log.event("load", {{"loads", network.loads().size()}, {"ms", ms_since(t0)}});
  }
  const auto validation = validate_network(network);
  if (!validation.ok()) {
    for (const auto& v : validation.violations) std::cerr << "invalid " << v.record << ": " << v.rule << "\n";
    log.event("validate", {{"violations", validation.violations.size()}});
    return 2;
  }

  const auto split = datagen::split_train_test(network.loads(), config.test_weeks);
  const auto train_prov = Provenance::of("train", split.train);
  const auto test_prov = Provenance::of("test", split.test);
  if (!split.train.empty() && !split.test.empty() && train_prov.last_day >= test_prov.first_day) {
    throw ContractViolation("training history overlaps the test window");
  }

  t0 = Clock::now();
  auto tactical = run_clustering(network, split.train, config, "train");
  log.event("cluster", {{"clusters", tactical.clusters.clusters.size()},
                        {"noise", tactical.clusters.noise.size()},
                        {"ms", ms_since(t0)}});
  t0 = Clock::now();
  run_mining(tactical, network, config);
  const auto candidates = tactical.candidates();
  log.event("mine", {{"groups", tactical.mined.size()}, {"candidates", candidates.size()}, {"ms", ms_since(t0)}});
  io::write_file_atomic(out / "train" / "clusters.jsonl", clusters_jsonl(tactical.clusters));
  io::write_file_atomic(out / "train" / "transactions.jsonl", transactions_jsonl(tactical.transactions, train_prov));
  io::write_file_atomic(out / "train" / "candidates.jsonl", candidates_jsonl(candidates, train_prov));
  io::write_file_atomic(out / "train" / "cps.json", cps_json(candidates, train_prov));

  t0 = Clock::now();
  auto days = build_days(split.test, tactical, tiers, network, config, test_prov);
  {
    std::string s;
    for (const auto& d : days) s += day_instance_json(d) + "\n";
    io::write_file_atomic(out / "plans" / "paths.jsonl", s);
  }
  log.event("paths", {{"instances", days.size()}, {"ms", ms_since(t0)}});

  t0 = Clock::now();
  auto result = plan_days(std::move(days), config);
  for (std::size_t d = 0; d < result.days.size(); ++d) {
    const auto& info = result.days[d].info;
    log.event("solve", {{"destination", to_string(info.destination)},
                        {"due_day", info.due_day},
                        {"loads", info.loads.size()},
                        {"paths", result.days[d].instance.path_count()},
                        {"optimal", result.plans[d].spot.optimal},
                        {"nodes", result.plans[d].spot.stats.nodes},
                        {"ms", result.solve_ms[d]}});
  }
  for (const auto& e : result.errors) {
    log.event("error", {{"stage", e.stage}, {"where", e.where}, {"message", e.message}});
    std::cerr << "error in stage " << e.stage << ", " << e.where << ": " << e.message << "\n";
  }
  log.event("plan", {{"instances", result.days.size()}, {"ms", ms_since(t0)}});

  std::vector<solver::Plan> tl, nnch, spot;
  for (const auto& p : result.plans) {
    tl.push_back(p.tl);
    nnch.push_back(p.nnch);
    spot.push_back(p.spot);
  }
  const std::pair<const char*, const std::vector<solver::Plan>*> methods[] = {
      {"tl", &tl}, {"nnch", &nnch}, {"spot", &spot}};
  for (const auto& [name, plans] : methods) {
    io::write_file_atomic(out / "plans" / name / "plan.jsonl", plan_jsonl(result.days, *plans));
    io::write_file_atomic(out / "plans" / name / "plan_summary.json",
                          plan_summary_json(result.days, *plans, name));
  }

  t0 = Clock::now();
  const auto report = evaluate_days(result.days, tl, nnch, spot, tactical.transactions, config);
  io::write_file_atomic(out / "report.json", report.to_json());
  io::write_file_atomic(out / "report.txt", report.to_text());
  log.event("evaluate", {{"ms", ms_since(t0)}});
  return result.errors.empty() ? 0 : 1;
}

}  // namespace loadcons::pipeline
