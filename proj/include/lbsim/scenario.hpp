#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lbsim/balancers.hpp"
#include "lbsim/queue_tier.hpp"
#include "lbsim/rl.hpp"
#include "lbsim/workload.hpp"

namespace lbsim {

enum class Mode { kPullRl, kPush };

struct QueueSpec {
  std::string id;
  std::uint64_t capacity = 10000;  // 0 = unbounded
};

struct ServerSpec {
  std::string id;
  double base_rate = 1.0;
  int concurrency = 1;
  int weight = 1;
  std::vector<std::string> subscription;  // empty = all queues, config order
};

struct FaultSpec {
  double time = 0.0;
  std::string server;
  double factor = 1.0;
};

struct ScenarioConfig {
  std::string run_id;  // empty = derived from seed at run time
  Mode mode = Mode::kPullRl;
  PolicyTag policy = PolicyTag::kRoundRobin;  // push mode only
  WorkloadConfig workload;
  AdmissionConfig admission;
  std::vector<QueueSpec> queues;
  std::vector<ClassificationRule> rules;
  std::vector<ServerSpec> farm;
  SupervisorConfig supervisor;  // pull mode only
  double kappa = 0.05;          // credit gain on effective rate
  double epoch_dt = 0.1;        // agent decision epoch
  std::vector<FaultSpec> faults;
  double metrics_interval = 1.0;
};

ScenarioConfig default_scenario();

struct ParseResult {
  std::optional<ScenarioConfig> config;
  std::vector<std::string> errors;  // all of them, not just the first
};

// JSON text -> validated config with defaults filled in.
ParseResult parse_scenario(const std::string& text);
ParseResult scenario_from_json(const nlohmann::json& j);

// Semantic-level validation of an already-built config.
std::vector<std::string> validate_scenario(const ScenarioConfig& cfg);

// Fully defaulted dump; parse(normalize(x)) == normalize(x) semantically.
nlohmann::ordered_json normalize_scenario(const ScenarioConfig& cfg);

}  // namespace lbsim
