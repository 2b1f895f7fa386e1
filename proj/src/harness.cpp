#include "cbsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cbsim/balancing.hpp"
#include "cbsim/rng.hpp"

namespace cbsim {

const char* const kCodeVersion = "cbsim 0.1.0";

std::vector<std::int64_t> log_checkpoints(std::int64_t horizon, int n) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  std::vector<std::int64_t> points;
  const double log_t = std::log(static_cast<double>(horizon));
  for (int i = 0; i < n; ++i) {
    const double frac = n == 1 ? 1.0 : static_cast<double>(i) / (n - 1);
    points.push_back(static_cast<std::int64_t>(
        std::llround(std::exp(frac * log_t))));
  }
  points.push_back(horizon);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

namespace {

void run_replicate(const RunConfig& cfg,
                   const std::vector<std::int64_t>& checkpoints, int replicate,
                   std::vector<double>& regret_row, std::vector<int>& learner_row,
                   std::vector<double>& realized_row) {
  Rng rng(replicate_seed(cfg.base_seed, static_cast<std::uint64_t>(replicate)));
  std::unique_ptr<Policy> policy = cfg.make_policy();
  auto* db = dynamic_cast<DbPolicy*>(policy.get());
  const auto [a_star, gap_min] = cfg.env->optimal_stats();
  (void)gap_min;
  const double mu_star = cfg.env->mean_reward(a_star);

  std::size_t next_cp = 0;
  double cum_regret = 0.0;
  double cum_reward = 0.0;
  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const ActionId a = policy->select(t);
    const StepOutcome out = cfg.env->sample_step(a, rng);
    policy->observe(a, out.context, out.reward);
    cum_regret += mu_star - cfg.env->mean_reward(a);
    cum_reward += out.reward;
    if (next_cp < checkpoints.size() && t == checkpoints[next_cp]) {
      regret_row[next_cp] = cum_regret;
      learner_row[next_cp] = db ? db->last_learner() : -1;
      realized_row[next_cp] = cum_reward;
      ++next_cp;
    }
  }
}

}  // namespace

RegretCurve run_simulation(const RunConfig& cfg) {
  if (cfg.env == nullptr || !cfg.make_policy) {
    throw std::invalid_argument("config missing environment or policy");
  }
  if (cfg.horizon < 1 || cfg.replicates < 1) {
    throw std::invalid_argument("horizon and replicates must be >= 1");
  }
  RegretCurve curve;
  curve.checkpoints =
      cfg.checkpoints.empty() ? log_checkpoints(cfg.horizon) : cfg.checkpoints;
  const std::size_t n_cp = curve.checkpoints.size();
  const auto n_rep = static_cast<std::size_t>(cfg.replicates);
  curve.per_replicate.assign(n_rep, std::vector<double>(n_cp, 0.0));
  curve.learner.assign(n_rep, std::vector<int>(n_cp, -1));
  std::vector<std::vector<double>> realized(n_rep,
                                            std::vector<double>(n_cp, 0.0));

  int n_threads = cfg.threads > 0
                      ? cfg.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, cfg.replicates));

  // Each replicate writes only its own rows, so the strided parallel sweep
  // produces the same bytes as a serial loop.
  std::vector<std::thread> pool;
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w] {
      for (int r = w; r < cfg.replicates; r += n_threads) {
        const auto i = static_cast<std::size_t>(r);
        run_replicate(cfg, curve.checkpoints, r, curve.per_replicate[i],
                      curve.learner[i], realized[i]);
      }
    });
  }
  for (auto& th : pool) th.join();

  curve.mean.assign(n_cp, 0.0);
  curve.stderr_.assign(n_cp, 0.0);
  curve.realized_mean.assign(n_cp, 0.0);
  const double n = static_cast<double>(cfg.replicates);
  for (std::size_t c = 0; c < n_cp; ++c) {
    double sum = 0.0;
    double realized_sum = 0.0;
    for (std::size_t r = 0; r < n_rep; ++r) {
      sum += curve.per_replicate[r][c];
      realized_sum += realized[r][c];
    }
    curve.mean[c] = sum / n;
    curve.realized_mean[c] = realized_sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < n_rep; ++r) {
      const double dev = curve.per_replicate[r][c] - curve.mean[c];
      ss += dev * dev;
    }
    curve.stderr_[c] =
        cfg.replicates > 1 ? std::sqrt(ss / (n * (n - 1.0))) : 0.0;
  }
  return curve;
}

std::vector<double> pseudo_regret(const Environment& env,
                                  const std::vector<ActionId>& actions) {
  const auto [a_star, gap_min] = env.optimal_stats();
  (void)gap_min;
  const double mu_star = env.mean_reward(a_star);
  std::vector<double> curve;
  curve.reserve(actions.size());
  double cum = 0.0;
  for (ActionId a : actions) {
    cum += mu_star - env.mean_reward(a);
    curve.push_back(cum);
  }
  return curve;
}

namespace {

double run_db_final_regret(const Environment& env, const DbHyperparams& params,
                           double d1, double d2, std::int64_t horizon,
                           int replicates, std::uint64_t seed, double delta,
                           int threads) {
  RunConfig cfg;
  cfg.env = &env;
  cfg.horizon = horizon;
  cfg.replicates = replicates;
  cfg.base_seed = seed;
  cfg.checkpoints = {horizon};
  cfg.threads = threads;
  cfg.make_policy = [&env, params, d1, d2, horizon, delta] {
    auto cucb = std::make_unique<CucbPolicy>(env.marginals(), horizon, delta);
    auto ucb = std::make_unique<UcbPolicy>(env.n_actions(), horizon, delta);
    return std::make_unique<DbPolicy>(std::move(cucb), std::move(ucb), d1, d2,
                                      params, delta);
  };
  return run_simulation(cfg).mean.back();
}

}  // namespace

std::vector<ParetoRow> sweep_pareto(const SweepConfig& cfg) {
  if (cfg.benign_env == nullptr || cfg.hard_env == nullptr) {
    throw std::invalid_argument("sweep needs both environments");
  }
  if (cfg.z2_grid.empty()) throw std::invalid_argument("empty Z2 grid");
  if (cfg.benign_env->n_actions() != cfg.hard_env->n_actions() ||
      cfg.benign_env->n_contexts() != cfg.hard_env->n_contexts()) {
    throw std::invalid_argument("environment pair has mismatched dimensions");
  }
  const int n_actions = cfg.benign_env->n_actions();
  const int n_contexts = cfg.benign_env->n_contexts();
  const double t = static_cast<double>(cfg.horizon);
  const double delta =
      cfg.delta > 0.0 ? cfg.delta : 1.0 / static_cast<double>(cfg.horizon);
  const double d1 = d_cucb_default(n_contexts, cfg.horizon, delta);
  const double d2 = d_ucb_default(n_actions, cfg.horizon, delta);

  std::vector<ParetoRow> rows;
  for (double z2 : cfg.z2_grid) {
    RatePair rates;
    rates.r2 = z2 * std::sqrt(n_actions * t);
    rates.r1 = std::max(std::sqrt(n_contexts * t), n_actions * t / rates.r2);
    DbHyperparams params;
    try {
      params = db_hyperparams(rates, d1, d2, n_actions, n_contexts,
                              cfg.horizon, delta);
    } catch (const std::invalid_argument& e) {
      std::cerr << "sweep: skipping Z2 = " << z2 << " (" << e.what() << ")\n";
      continue;
    }
    ParetoRow row;
    row.z2 = z2;
    row.benign_regret =
        run_db_final_regret(*cfg.benign_env, params, d1, d2, cfg.horizon,
                            cfg.replicates, cfg.base_seed, delta, cfg.threads);
    row.hard_regret =
        run_db_final_regret(*cfg.hard_env, params, d1, d2, cfg.horizon,
                            cfg.replicates, cfg.base_seed ^ 0x9e3779b9ULL,
                            delta, cfg.threads);
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::vector<double> ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> rank(values.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
      ++j;
    }
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman_correlation(const std::vector<ParetoRow>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("need at least two rows");
  std::vector<double> x, y;
  for (const auto& r : rows) {
    x.push_back(r.benign_regret);
    y.push_back(r.hard_regret);
  }
  const std::vector<double> rx = ranks(x);
  const std::vector<double> ry = ranks(y);
  const double n = static_cast<double>(rows.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

void write_regret_csv(std::ostream& out, const RunConfig& cfg,
                      const RegretCurve& curve) {
  out << "run_id,policy,env,replicate,t,cum_regret,learner\n";
  char buf[64];
  for (std::size_t r = 0; r < curve.per_replicate.size(); ++r) {
    for (std::size_t c = 0; c < curve.checkpoints.size(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", curve.per_replicate[r][c]);
      out << cfg.run_id << ',' << cfg.policy_name << ',' << cfg.env_name << ','
          << r << ',' << curve.checkpoints[c] << ',' << buf << ','
          << curve.learner[r][c] << '\n';
    }
  }
}

void write_pareto_csv(std::ostream& out, const std::vector<ParetoRow>& rows) {
  out << "z2,benign_regret,hard_regret\n";
  char buf[160];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", row.z2,
                  row.benign_regret, row.hard_regret);
    out << buf << '\n';
  }
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_metadata_json(std::ostream& out, const std::string& config_text,
                         std::uint64_t seed) {
  std::ostringstream hash;
  hash << std::hex << fnv1a_hash(config_text);
  out << "{\n"
      << "  \"config_hash\": \"" << hash.str() << "\",\n"
      << "  \"seed\": " << seed << ",\n"
      << "  \"generator\": \"" << Rng::kName << "\",\n"
      << "  \"code_version\": \"" << kCodeVersion << "\"\n"
      << "}\n";
}

}  // namespace cbsim
