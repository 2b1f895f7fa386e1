#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cbsim/balancing.hpp"
#include "cbsim/config.hpp"
#include "cbsim/design.hpp"
#include "cbsim/env.hpp"
#include "cbsim/harness.hpp"
#include "cbsim/instances.hpp"
#include "cbsim/oracle.hpp"
#include "cbsim/phased_elim.hpp"
#include "cbsim/svg.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_instance(const std::string& family, int actions, int contexts,
                 double delta, int a0, int z0, const std::string& out_path) {
  json spec;
  spec["family"] = family;
  spec["actions"] = actions;
  spec["contexts"] = contexts;
  spec["delta"] = delta;
  if (a0 >= 0) spec["a0"] = a0;
  if (z0 > 0) spec["z0"] = z0;
  const cbsim::LoadedEnvironment loaded = cbsim::environment_from_json(spec);
  const std::string text = cbsim::environment_to_json(loaded.env);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return 0;
}

int cmd_design(const std::string& env_path, bool exact, double tol) {
  const cbsim::Environment env = cbsim::load_environment_file(env_path);
  const auto vectors = cbsim::rows_as_vectors(env.marginals());
  const cbsim::SpanReduction red = cbsim::reduce_to_span(vectors, tol);
  cbsim::Design design;
  if (exact) {
    design = cbsim::exact_design_grid(red.reduced_vectors, 120);
  } else {
    design = cbsim::frank_wolfe_design(red.reduced_vectors, red.rank);
  }
  const double g = cbsim::kw_gap(red.reduced_vectors, design);
  std::cout << "d_span: " << red.rank << "\n";
  std::cout << "support size: " << design.support.size() << "\n";
  std::cout << "g(pi): " << g << "\n";
  std::cout << "weights:";
  for (double w : design.weights) std::cout << ' ' << w;
  std::cout << "\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  const std::string config_text = read_file(config_path);
  const json cfg_json = json::parse(config_text);
  const cbsim::LoadedEnvironment loaded =
      cbsim::environment_from_json(cfg_json.at("env"));

  cbsim::RunConfig cfg;
  cfg.run_id = cfg_json.value("run_id", "run");
  cfg.env = &loaded.env;
  cfg.env_name = loaded.name;
  cfg.horizon = cfg_json.at("horizon").get<std::int64_t>();
  cfg.replicates = cfg_json.value("replicates", 1);
  cfg.base_seed = cfg_json.value("seed", std::uint64_t{1});
  cfg.threads = cfg_json.value("threads", 0);
  const cbsim::PolicySetup policy =
      cbsim::policy_from_json(cfg_json.at("policy"), loaded.env, cfg.horizon);
  cfg.policy_name = policy.name;
  cfg.make_policy = policy.factory;

  const cbsim::RegretCurve curve = cbsim::run_simulation(cfg);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  {
    std::ofstream csv(dir / (cfg.run_id + ".csv"), std::ios::binary);
    cbsim::write_regret_csv(csv, cfg, curve);
  }
  cbsim::SvgSeries series;
  series.label = cfg.policy_name;
  for (std::size_t c = 0; c < curve.checkpoints.size(); ++c) {
    series.x.push_back(static_cast<double>(curve.checkpoints[c]));
    series.y.push_back(curve.mean[c]);
    series.yerr.push_back(curve.stderr_[c]);
  }
  write_file(dir / (cfg.run_id + ".svg"),
             cbsim::render_regret_svg({series}, cfg.run_id + " on " +
                                                    cfg.env_name));
  {
    std::ofstream meta(dir / (cfg.run_id + "_meta.json"), std::ios::binary);
    cbsim::write_metadata_json(meta, config_text, cfg.base_seed);
  }
  std::cout << "final mean regret: " << curve.mean.back() << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
  const std::string config_text = read_file(config_path);
  const json cfg_json = json::parse(config_text);
  const cbsim::LoadedEnvironment benign =
      cbsim::environment_from_json(cfg_json.at("benign_env"));
  const cbsim::LoadedEnvironment hard =
      cbsim::environment_from_json(cfg_json.at("hard_env"));

  cbsim::SweepConfig cfg;
  cfg.benign_env = &benign.env;
  cfg.hard_env = &hard.env;
  cfg.horizon = cfg_json.at("horizon").get<std::int64_t>();
  cfg.replicates = cfg_json.value("replicates", 1);
  cfg.base_seed = cfg_json.value("seed", std::uint64_t{1});
  cfg.threads = cfg_json.value("threads", 0);
  if (cfg_json.contains("delta") && cfg_json.at("delta").is_number()) {
    cfg.delta = cfg_json.at("delta").get<double>();
  }
  if (cfg_json.contains("z2_grid")) {
    cfg.z2_grid = cfg_json.at("z2_grid").get<std::vector<double>>();
  } else {
    const double base = std::sqrt(static_cast<double>(benign.env.n_actions()) /
                                  benign.env.n_contexts());
    for (double s : {1.0, 2.0, 4.0, 8.0}) cfg.z2_grid.push_back(s * base);
  }

  const std::vector<cbsim::ParetoRow> rows = cbsim::sweep_pareto(cfg);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  const std::string run_id = cfg_json.value("run_id", "pareto");
  {
    std::ofstream csv(dir / (run_id + ".csv"), std::ios::binary);
    cbsim::write_pareto_csv(csv, rows);
  }
  write_file(dir / (run_id + ".svg"),
             cbsim::render_pareto_svg(rows, "Pareto sweep"));
  {
    std::ofstream meta(dir / (run_id + "_meta.json"), std::ios::binary);
    cbsim::write_metadata_json(meta, config_text, cfg.base_seed);
  }
  if (rows.size() >= 2) {
    std::cout << "spearman(benign, hard): "
              << cbsim::spearman_correlation(rows) << "\n";
  }
  return 0;
}

int cmd_verify_event(const std::string& env_path, const std::string& event,
                     int runs, std::int64_t horizon, double delta) {
  const cbsim::Environment env = cbsim::load_environment_file(env_path);
  const cbsim::ConcentrationEvent which = cbsim::parse_event_name(event);
  int violations = 0;
  for (int r = 0; r < runs; ++r) {
    cbsim::Rng rng(cbsim::replicate_seed(12345, static_cast<std::uint64_t>(r)));
    std::unique_ptr<cbsim::Policy> policy;
    if (which == cbsim::ConcentrationEvent::ActionMeans) {
      policy = std::make_unique<cbsim::UcbPolicy>(env.n_actions(), horizon,
                                                  delta);
    } else {
      policy = std::make_unique<cbsim::CucbPolicy>(env.marginals(), horizon,
                                                   delta);
    }
    cbsim::Trace trace;
    for (std::int64_t t = 1; t <= horizon; ++t) {
      const cbsim::ActionId a = policy->select(t);
      const cbsim::StepOutcome out = env.sample_step(a, rng);
      policy->observe(a, out.context, out.reward);
      trace.actions.push_back(a);
      trace.contexts.push_back(out.context);
      trace.rewards.push_back(out.reward);
    }
    const cbsim::EventReport report =
        cbsim::event_monitor(trace, env, delta, which);
    if (!report.held) ++violations;
  }
  const double rate = static_cast<double>(violations) / runs;
  std::cout << "event " << event << ": " << violations << "/" << runs
            << " runs violated (rate " << rate << ", target <= " << delta
            << ")\n";
  return 0;
}

int cmd_verify_design() {
  // Small bundled instances: basis sets and the adversarial feature set.
  int failures = 0;
  const auto check = [&](const std::string& name,
                         const std::vector<Eigen::VectorXd>& vectors) {
    const cbsim::SpanReduction red = cbsim::reduce_to_span(vectors);
    const cbsim::Design fw =
        cbsim::frank_wolfe_design(red.reduced_vectors, red.rank);
    const cbsim::Design grid =
        cbsim::exact_design_grid(red.reduced_vectors, 200);
    const double g_fw = cbsim::kw_gap(red.reduced_vectors, fw);
    const double g_grid = cbsim::kw_gap(red.reduced_vectors, grid);
    const bool ok = g_fw <= 1.05 * g_grid;
    if (!ok) ++failures;
    std::cout << name << ": g_fw = " << g_fw << ", g_grid = " << g_grid
              << (ok ? " [ok]" : " [MISMATCH]") << "\n";
  };

  {
    std::vector<Eigen::VectorXd> basis2(2, Eigen::VectorXd::Zero(2));
    basis2[0][0] = 1.0;
    basis2[1][1] = 1.0;
    check("basis-2", basis2);
  }
  {
    std::vector<Eigen::VectorXd> skew(3, Eigen::VectorXd::Zero(2));
    skew[0] << 1.0, 0.0;
    skew[1] << 0.0, 1.0;
    skew[2] << 0.8, 0.2;
    check("skew-3", skew);
  }
  {
    const cbsim::Environment env = cbsim::pe_adversarial(4, 3, 0.3);
    check("pe-adversarial", cbsim::rows_as_vectors(env.marginals()));
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandit simulator with post-action contexts"};
  app.require_subcommand(1);

  auto* inst = app.add_subcommand("instance", "Emit an instance family member");
  std::string family, out_path;
  int actions = 0, contexts = 0, a0 = -1, z0 = 0;
  double delta = 0.0;
  inst->add_option("--family", family)
      ->required()
      ->check(CLI::IsMember({"d1-benign", "d1-variant", "d2",
                             "pe-adversarial"}));
  inst->add_option("--actions", actions)->required();
  inst->add_option("--contexts", contexts)->required();
  inst->add_option("--delta", delta)->required();
  inst->add_option("--a0", a0);
  inst->add_option("--z0", z0);
  inst->add_option("--out", out_path);

  auto* des = app.add_subcommand("design", "Compute a near-G-optimal design");
  std::string env_path;
  bool exact = false;
  double tol = 1e-9;
  des->add_option("--env", env_path)->required();
  des->add_flag("--exact", exact);
  des->add_option("--tol", tol);

  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo simulation");
  std::string sim_config, sim_out = ".";
  sim->add_option("--config", sim_config)->required();
  sim->add_option("--out", sim_out);

  auto* sweep = app.add_subcommand("sweep-pareto", "Run the Pareto sweep");
  std::string sweep_config, sweep_out = ".";
  sweep->add_option("--config", sweep_config)->required();
  sweep->add_option("--out", sweep_out);

  auto* verify = app.add_subcommand("verify", "Run oracle diagnostics");
  std::string verify_env, event = "EA";
  int runs = 100;
  std::int64_t horizon = 2000;
  double vdelta = 0.1;
  bool verify_design = false;
  verify->add_option("--env", verify_env);
  verify->add_option("--event", event)
      ->check(CLI::IsMember({"EA", "EZ", "EMG"}));
  verify->add_option("--runs", runs);
  verify->add_option("--horizon", horizon);
  verify->add_option("--delta", vdelta);
  verify->add_flag("--design", verify_design);

  CLI11_PARSE(app, argc, argv);

  try {
    if (inst->parsed()) {
      return cmd_instance(family, actions, contexts, delta, a0, z0, out_path);
    }
    if (des->parsed()) return cmd_design(env_path, exact, tol);
    if (sim->parsed()) return cmd_simulate(sim_config, sim_out);
    if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out);
    if (verify->parsed()) {
      if (verify_design) return cmd_verify_design();
      if (verify_env.empty()) {
        std::cerr << "verify needs --env or --design\n";
        return 2;
      }
      return cmd_verify_event(verify_env, event, runs, horizon, vdelta);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
