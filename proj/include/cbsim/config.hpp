#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "cbsim/harness.hpp"

namespace cbsim {

// Environment source: either the string "file:<path>" or an inline family
// object {"family":"d1-benign"|"d1-variant"|"d2"|"pe-adversarial",
//         "actions":N, "contexts":M, "delta":X, "a0":K, "z0":S}.
struct LoadedEnvironment {
  Environment env;
  std::string name;
};

LoadedEnvironment environment_from_json(const nlohmann::json& spec);

// "1/T", a number, or absent (defaults to 1/T).
double parse_delta(const nlohmann::json& parent, std::int64_t horizon);

// Marginal source for policies that take marginals as prior knowledge:
// "true" (the environment's own), "file:<path>", or "perturbed:<eps>".
std::vector<std::vector<double>> marginals_from_spec(const std::string& spec,
                                                     const Environment& env);

struct PolicySetup {
  std::string name;
  PolicyFactory factory;
};

// Policy spec fragments:
//   {"policy":"ucb","delta":0.1}
//   {"policy":"cucb","delta":0.1,"marginals":"true"}
//   {"policy":"pe","delta":0.1,"marginals":"true","design":"fw"|"exact"}
//   {"policy":"fixed","action":0}
//   {"policy":"db","base":[<spec>,<spec>],
//    "rates":{"r1":"sqrt_ZT","r2_scale":1.0},"delta":"1/T",
//    "d_overrides":{"d1":...,"d2":...}}
PolicySetup policy_from_json(const nlohmann::json& spec, const Environment& env,
                             std::int64_t horizon);

}  // namespace cbsim
