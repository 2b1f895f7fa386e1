#include "cbsim/config.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "cbsim/balancing.hpp"
#include "cbsim/instances.hpp"
#include "cbsim/phased_elim.hpp"

namespace cbsim {

namespace {

using nlohmann::json;

SplitSpec split_from_json(const json& spec, int n_contexts) {
  SplitSpec split;
  split.z0_size = spec.value("z0", n_contexts / 2);
  split.delta = spec.at("delta").get<double>();
  return split;
}

}  // namespace

LoadedEnvironment environment_from_json(const nlohmann::json& spec) {
  if (spec.is_string()) {
    const std::string s = spec.get<std::string>();
    if (s.rfind("file:", 0) == 0) {
      return {load_environment_file(s.substr(5)), s.substr(5)};
    }
    throw std::invalid_argument("environment string must be file:<path>");
  }
  const std::string family = spec.at("family").get<std::string>();
  const int actions = spec.at("actions").get<int>();
  const int contexts = spec.at("contexts").get<int>();
  if (family == "d1-benign") {
    return {hard_benign(actions, contexts, split_from_json(spec, contexts)),
            family};
  }
  if (family == "d1-variant") {
    return {hard_nonbenign_variant(actions, contexts,
                                   split_from_json(spec, contexts),
                                   spec.at("a0").get<int>()),
            family};
  }
  if (family == "d2") {
    std::optional<ActionId> a0;
    if (spec.contains("a0")) a0 = spec.at("a0").get<int>();
    return {agnostic_variant(actions, contexts,
                             split_from_json(spec, contexts), a0),
            family};
  }
  if (family == "pe-adversarial") {
    return {pe_adversarial(actions, contexts, spec.at("delta").get<double>()),
            family};
  }
  throw std::invalid_argument("unknown environment family: " + family);
}

double parse_delta(const nlohmann::json& parent, std::int64_t horizon) {
  if (!parent.contains("delta")) {
    return 1.0 / static_cast<double>(horizon);
  }
  const auto& d = parent.at("delta");
  if (d.is_string()) {
    if (d.get<std::string>() == "1/T") {
      return 1.0 / static_cast<double>(horizon);
    }
    throw std::invalid_argument("delta string must be \"1/T\"");
  }
  return d.get<double>();
}

std::vector<std::vector<double>> marginals_from_spec(const std::string& spec,
                                                     const Environment& env) {
  if (spec == "true") return env.marginals();
  if (spec.rfind("file:", 0) == 0) {
    return load_environment_file(spec.substr(5)).marginals();
  }
  if (spec.rfind("perturbed:", 0) == 0) {
    const double eps = std::stod(spec.substr(10));
    return perturb_marginals(env.marginals(), eps);
  }
  throw std::invalid_argument("unknown marginal source: " + spec);
}

PolicySetup policy_from_json(const nlohmann::json& spec, const Environment& env,
                             std::int64_t horizon) {
  const std::string kind = spec.at("policy").get<std::string>();
  const double delta = parse_delta(spec, horizon);

  if (kind == "ucb") {
    const int n = env.n_actions();
    return {"ucb", [n, horizon, delta] {
              return std::make_unique<UcbPolicy>(n, horizon, delta);
            }};
  }
  if (kind == "cucb") {
    auto marginals =
        marginals_from_spec(spec.value("marginals", "true"), env);
    return {"cucb", [marginals, horizon, delta] {
              return std::make_unique<CucbPolicy>(marginals, horizon, delta);
            }};
  }
  if (kind == "pe") {
    auto marginals =
        marginals_from_spec(spec.value("marginals", "true"), env);
    const std::string design = spec.value("design", "fw");
    if (design != "fw" && design != "exact") {
      throw std::invalid_argument("design must be \"fw\" or \"exact\"");
    }
    const auto mode = design == "exact"
                          ? PhasedElimPolicy::DesignMode::ExactGrid
                          : PhasedElimPolicy::DesignMode::FrankWolfe;
    return {"pe", [marginals, horizon, delta, mode] {
              return std::make_unique<PhasedElimPolicy>(marginals, horizon,
                                                        delta, mode);
            }};
  }
  if (kind == "fixed") {
    const int action = spec.at("action").get<int>();
    if (action < 0 || action >= env.n_actions()) {
      throw std::invalid_argument("fixed action out of range");
    }
    return {"fixed", [action] {
              return std::make_unique<FixedActionPolicy>(action);
            }};
  }
  if (kind == "db") {
    const auto& base = spec.at("base");
    if (!base.is_array() || base.size() != 2) {
      throw std::invalid_argument("db needs exactly two base policy specs");
    }
    PolicySetup base1 = policy_from_json(base[0], env, horizon);
    PolicySetup base2 = policy_from_json(base[1], env, horizon);

    auto default_d = [&](const json& base_spec,
                         const std::string& name) -> double {
      if (name == "ucb") {
        return d_ucb_default(env.n_actions(), horizon, delta);
      }
      if (name == "cucb") {
        return d_cucb_default(env.n_contexts(), horizon, delta);
      }
      if (name == "pe") {
        const auto marginals =
            marginals_from_spec(base_spec.value("marginals", "true"), env);
        return d_pe_default(dim_span(marginals), env.n_actions(), horizon,
                            delta);
      }
      throw std::invalid_argument("no default candidate-regret factor for " +
                                  name);
    };
    double d1, d2;
    const json overrides = spec.value("d_overrides", json::object());
    d1 = overrides.contains("d1") ? overrides.at("d1").get<double>()
                                  : default_d(base[0], base1.name);
    d2 = overrides.contains("d2") ? overrides.at("d2").get<double>()
                                  : default_d(base[1], base2.name);

    const json rates_spec = spec.value("rates", json::object());
    const double t = static_cast<double>(horizon);
    RatePair rates;
    const double r2_scale = rates_spec.value("r2_scale", 1.0);
    rates.r2 = r2_scale * std::sqrt(env.n_actions() * t);
    const std::string r1_spec = rates_spec.value("r1", "sqrt_ZT");
    if (r1_spec == "sqrt_ZT") {
      rates.r1 = std::max(std::sqrt(env.n_contexts() * t),
                          env.n_actions() * t / rates.r2);
    } else {
      throw std::invalid_argument("rates.r1 must be \"sqrt_ZT\"");
    }
    const DbHyperparams params =
        db_hyperparams(rates, d1, d2, env.n_actions(), env.n_contexts(),
                       horizon, delta);

    auto f1 = base1.factory;
    auto f2 = base2.factory;
    return {"db", [f1, f2, d1, d2, params, delta] {
              return std::make_unique<DbPolicy>(f1(), f2(), d1, d2, params,
                                                delta);
            }};
  }
  throw std::invalid_argument("unknown policy kind: " + kind);
}

}  // namespace cbsim
