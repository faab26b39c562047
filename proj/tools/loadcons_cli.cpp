// Command-line front end: generate, cluster, mine, paths, plan, evaluate, pipeline.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "loadcons/baseline.hpp"
#include "loadcons/datagen.hpp"
#include "loadcons/io.hpp"
#include "loadcons/pipeline.hpp"

namespace fs = std::filesystem;
using namespace loadcons;

namespace {

struct Flags {
  std::string config_file;
  std::string out;
  int jobs = 1;
  std::uint64_t seed = 7;
  std::string data;
  int test_weeks = 0;
  double eps = 0.30;
  int min_pts = 2;
  std::string min_sup = "5";
  bool maximal = false;
  std::string dest = "all";
  std::string capacity_scope = "all";
  std::string normalize = "within";
  std::uint64_t budget_nodes = 10'000'000;
  double budget_secs = 60.0;
  std::string solver = "exact";
  std::string input;
  std::string plans;
  std::string train;
  std::string candidates;
  std::string gen_config;
  int days = 182;
};

Network load_network(const std::string& dir) {
  if (dir.empty()) throw ConfigError("--data <dir> is required");
  auto network = io::read_network(dir);
  const auto report = validate_network(network);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw DataError("invalid network: " + v.record + ": " + v.rule + " (" +
                    std::to_string(report.violations.size()) + " violations)");
  }
  return network;
}

fs::path out_dir(const Flags& f) {
  if (f.out.empty()) throw ConfigError("--out is required");
  fs::create_directories(f.out);
  return f.out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Freight load consolidation engine"};
  app.fallthrough();
  app.require_subcommand(1);
  Flags f;

  auto* opt_config = app.add_option("--config", f.config_file, "pipeline config (JSON)");
  app.add_option("--out", f.out, "output directory (report file for evaluate)");
  auto* opt_jobs = app.add_option("--jobs", f.jobs, "worker threads")->check(CLI::Range(1, 1024));
  auto* opt_seed = app.add_option("--seed", f.seed, "random seed");
  (void)opt_config;

  auto* gen = app.add_subcommand("generate", "write a synthetic network and load history");
  auto* opt_days = gen->add_option("--days", f.days, "horizon in days")->check(CLI::PositiveNumber);
  gen->add_option("--gen-config", f.gen_config, "generator overrides (JSON)");

  auto* clu = app.add_subcommand("cluster", "cluster partial loads by route bearing");
  auto* mine = app.add_subcommand("mine", "cluster, then mine consolidation candidates");
  auto* paths = app.add_subcommand("paths", "build destination-day instances from mined candidates");
  auto* plan = app.add_subcommand("plan", "solve destination-day instances");
  auto* evaluate = app.add_subcommand("evaluate", "compare TL, NNCH and SPOT plans");
  auto* pipe = app.add_subcommand("pipeline", "generate or load data, mine, plan and evaluate");

  std::vector<CLI::Option*> eps_opts, min_pts_opts, min_sup_opts, maximal_opts, tw_opts, scope_opts, norm_opts,
      bn_opts, bs_opts;
  for (auto* sc : {clu, mine, paths, pipe}) {
    sc->add_option("--data", f.data, "network directory");
    tw_opts.push_back(sc->add_option("--test-weeks", f.test_weeks, "weeks held out for testing"));
  }
  for (auto* sc : {clu, mine, pipe}) {
    eps_opts.push_back(sc->add_option("--eps", f.eps, "bearing radius in radians"));
    min_pts_opts.push_back(sc->add_option("--min-pts", f.min_pts, "DBSCAN core size"));
  }
  clu->add_option("--dest", f.dest, "destination terminal id or 'all'");
  for (auto* sc : {mine, pipe}) {
    min_sup_opts.push_back(sc->add_option("--min-sup", f.min_sup, "support count, or fraction with a '.'"));
    maximal_opts.push_back(sc->add_flag("--maximal", f.maximal, "keep maximal itemsets only"));
  }
  paths->add_option("--candidates", f.candidates, "candidates.jsonl from mine")->required();
  for (auto* sc : {paths, plan, evaluate, pipe}) {
    scope_opts.push_back(sc->add_option("--capacity-scope", f.capacity_scope, "paper | all"));
  }
  plan->add_option("--input", f.input, "paths.jsonl")->required();
  plan->add_option("--solver", f.solver, "exact | bruteforce | nnch | tl")
      ->check(CLI::IsMember({"exact", "bruteforce", "nnch", "tl"}));
  for (auto* sc : {plan, pipe}) {
    bn_opts.push_back(sc->add_option("--budget-nodes", f.budget_nodes, "branch node limit"));
    bs_opts.push_back(sc->add_option("--budget-secs", f.budget_secs, "time limit per instance"));
  }
  evaluate->add_option("--plans", f.plans, "directory with paths.jsonl and tl/ nnch/ spot/")->required();
  evaluate->add_option("--train", f.train, "candidates.jsonl from mine")->required();
  for (auto* sc : {evaluate, pipe}) norm_opts.push_back(sc->add_option("--normalize", f.normalize, "within | cross-tier"));
  pipe->add_option("--gen-config", f.gen_config, "generator overrides (JSON)");
  auto* opt_pipe_days = pipe->add_option("--days", f.days, "generator horizon in days");

  CLI11_PARSE(app, argc, argv);

  auto any = [](const std::vector<CLI::Option*>& opts) {
    for (auto* o : opts) {
      if (o->count() > 0) return true;
    }
    return false;
  };

  try {
    pipeline::PipelineConfig cfg;
    cfg.test_weeks = app.got_subcommand(pipe) ? 3 : 0;
    if (app.got_subcommand(paths)) cfg.test_weeks = 3;
    if (!f.config_file.empty()) cfg = pipeline::parse_pipeline_config(io::read_file(f.config_file), cfg);
    if (opt_jobs->count()) cfg.jobs = f.jobs;
    if (opt_seed->count()) cfg.seed = f.seed;
    if (any(eps_opts)) cfg.eps = f.eps;
    if (any(min_pts_opts)) cfg.min_pts = f.min_pts;
    if (any(min_sup_opts)) cfg.min_sup = f.min_sup;
    if (any(maximal_opts)) cfg.maximal = f.maximal;
    if (any(tw_opts)) cfg.test_weeks = f.test_weeks;
    if (any(scope_opts)) cfg.capacity_scope = f.capacity_scope;
    if (any(norm_opts)) cfg.normalize = f.normalize;
    if (any(bn_opts)) cfg.budget_nodes = f.budget_nodes;
    if (any(bs_opts)) cfg.budget_secs = f.budget_secs;
    cfg.validate();

    if (app.got_subcommand(gen)) {
      auto gc = f.gen_config.empty() ? datagen::GenConfig{} : datagen::parse_gen_config(io::read_file(f.gen_config));
      gc.seed = cfg.seed;
      if (opt_days->count()) gc.days = f.days;
      const auto g = datagen::generate(gc);
      datagen::write_generated(out_dir(f), g);
      std::cout << "wrote " << g.network.loads().size() << " loads to " << f.out << "\n";
      return 0;
    }

    if (app.got_subcommand(clu) || app.got_subcommand(mine)) {
      const auto network = load_network(f.data);
      const auto split = datagen::split_train_test(network.loads(), cfg.test_weeks);
      std::vector<Load> history = split.train;
      if (f.dest != "all") {
        std::erase_if(history, [&](const Load& l) { return l.destination.terminal != f.dest; });
      }
      const std::string split_name = cfg.test_weeks == 0 ? "all" : "train";
      auto tactical = pipeline::run_clustering(network, history, cfg, split_name);
      const auto out = out_dir(f);
      io::write_file_atomic(out / "clusters.jsonl", pipeline::clusters_jsonl(tactical.clusters));
      std::cout << tactical.clusters.clusters.size() << " clusters, " << tactical.clusters.noise.size()
                << " noise loads\n";
      if (app.got_subcommand(mine)) {
        pipeline::run_mining(tactical, network, cfg);
        const auto cands = tactical.candidates();
        io::write_file_atomic(out / "transactions.jsonl",
                              pipeline::transactions_jsonl(tactical.transactions, tactical.provenance));
        io::write_file_atomic(out / "candidates.jsonl", pipeline::candidates_jsonl(cands, tactical.provenance));
        io::write_file_atomic(out / "cps.json", pipeline::cps_json(cands, tactical.provenance));
        std::cout << cands.size() << " candidate sets\n";
      }
      return 0;
    }

    if (app.got_subcommand(paths)) {
      const auto network = load_network(f.data);
      const auto mined = pipeline::read_mined(f.candidates);
      const auto split = datagen::split_train_test(network.loads(), cfg.test_weeks);
      const auto test_prov = pipeline::Provenance::of("test", split.test);
      if (mined.provenance.split == "all" ||
          (mined.provenance.last_day >= test_prov.first_day && !split.test.empty())) {
        throw DataError("mined artifacts overlap the test window (mined through day " +
                        std::to_string(mined.provenance.last_day) + ")");
      }
      pipeline::Tactical tactical;
      tactical.provenance = mined.provenance;
      tactical.transactions = mined.transactions;
      for (const auto& c : mined.candidates) tactical.mined[c.group].candidates.push_back(c);
      std::map<Node, std::string> tiers;
      const auto tiers_file = fs::path(f.data) / "tiers.csv";
      if (fs::exists(tiers_file)) tiers = datagen::parse_tiers(io::read_file(tiers_file), tiers_file.string());
      const auto days = pipeline::build_days(split.test, tactical, tiers, network, cfg, test_prov);
      std::string s;
      for (const auto& d : days) s += pipeline::day_instance_json(d) + "\n";
      io::write_file_atomic(out_dir(f) / "paths.jsonl", s);
      std::cout << days.size() << " destination-day instances\n";
      return 0;
    }

    if (app.got_subcommand(plan)) {
      const auto days = pipeline::read_day_instances(f.input, solver::parse_capacity_scope(cfg.capacity_scope));
      std::vector<solver::Plan> plans;
      int failures = 0;
      for (const auto& d : days) {
        solver::Plan p;
        if (f.solver == "tl") {
          p = baseline::plan_tl(d.instance);
        } else if (f.solver == "nnch") {
          p = baseline::plan_nnch(d.instance);
        } else if (f.solver == "bruteforce") {
          p = solver::solve_bruteforce(d.instance);
        } else {
          p = solver::solve_exact(d.instance, cfg.budget(),
                                  {baseline::plan_tl(d.instance), baseline::plan_nnch(d.instance)});
        }
        for (const auto& v : solver::verify_plan(d.instance, p)) {
          std::cerr << to_string(d.info.destination) << " day " << d.info.due_day << ": " << v.constraint << ": "
                    << v.detail << "\n";
          ++failures;
        }
        plans.push_back(std::move(p));
      }
      const auto out = out_dir(f);
      io::write_file_atomic(out / "plan.jsonl", pipeline::plan_jsonl(days, plans));
      io::write_file_atomic(out / "plan_summary.json", pipeline::plan_summary_json(days, plans, f.solver));
      return failures == 0 ? 0 : 1;
    }

    if (app.got_subcommand(evaluate)) {
      const fs::path dir = f.plans;
      const auto days = pipeline::read_day_instances(dir / "paths.jsonl", solver::parse_capacity_scope(cfg.capacity_scope));
      const auto tl = pipeline::read_plans(dir / "tl" / "plan.jsonl", days);
      const auto nnch = pipeline::read_plans(dir / "nnch" / "plan.jsonl", days);
      const auto spot = pipeline::read_plans(dir / "spot" / "plan.jsonl", days);
      const auto mined = pipeline::read_mined(f.train);
      const auto report = pipeline::evaluate_days(days, tl, nnch, spot, mined.transactions, cfg);
      const fs::path out = f.out.empty() ? fs::path("report.json") : fs::path(f.out);
      io::write_file_atomic(out, report.to_json());
      auto txt = out;
      txt.replace_extension(".txt");
      io::write_file_atomic(txt, report.to_text());
      std::cout << report.to_text();
      return 0;
    }

    if (app.got_subcommand(pipe)) {
      pipeline::PipelineOptions opts;
      opts.data_dir = f.data;
      if (!f.gen_config.empty()) opts.gen_config_json = io::read_file(f.gen_config);
      if (opt_pipe_days->count()) opts.days = f.days;
      const int status = pipeline::run_pipeline(cfg, opts, out_dir(f));
      if (fs::exists(fs::path(f.out) / "report.txt")) std::cout << io::read_file(fs::path(f.out) / "report.txt");
      return status;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
