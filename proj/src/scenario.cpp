#include "lbsim/scenario.hpp"

#include <algorithm>
#include <set>

namespace lbsim {

namespace {

using nlohmann::json;

class Walker {
 public:
  explicit Walker(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& path, const std::string& msg) {
    errors_.push_back(path + ": " + msg);
  }

  bool expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
      error(path, "expected an object");
      return false;
    }
    return true;
  }

  double number(const json& j, const std::string& path, double def) {
    if (!j.contains(path_leaf(path))) return def;
    const json& v = j.at(path_leaf(path));
    if (!v.is_number()) {
      error(path, "expected a number");
      return def;
    }
    return v.get<double>();
  }

  std::int64_t integer(const json& j, const std::string& path, std::int64_t def) {
    if (!j.contains(path_leaf(path))) return def;
    const json& v = j.at(path_leaf(path));
    if (!v.is_number_integer()) {
      error(path, "expected an integer");
      return def;
    }
    return v.get<std::int64_t>();
  }

  std::string str(const json& j, const std::string& path, const std::string& def) {
    if (!j.contains(path_leaf(path))) return def;
    const json& v = j.at(path_leaf(path));
    if (!v.is_string()) {
      error(path, "expected a string");
      return def;
    }
    return v.get<std::string>();
  }

 private:
  static std::string path_leaf(const std::string& path) {
    auto pos = path.rfind('.');
    return pos == std::string::npos ? path : path.substr(pos + 1);
  }

  std::vector<std::string>& errors_;
};

ArrivalProcess parse_arrival(const json& j, Walker& w) {
  ArrivalProcess ap;
  if (!j.is_object()) {
    w.error("workload.arrival", "expected an object");
    return ap;
  }
  std::string process = w.str(j, "workload.arrival.process", "poisson");
  if (process == "poisson") {
    ap.kind = ArrivalProcess::Kind::kPoisson;
    ap.rate = w.number(j, "workload.arrival.rate", ap.rate);
  } else if (process == "deterministic") {
    ap.kind = ArrivalProcess::Kind::kDeterministic;
    ap.interval = w.number(j, "workload.arrival.interval", ap.interval);
  } else if (process == "bursty") {
    ap.kind = ArrivalProcess::Kind::kBursty;
    ap.base_rate = w.number(j, "workload.arrival.base_rate", ap.base_rate);
    ap.burst_rate = w.number(j, "workload.arrival.burst_rate", ap.burst_rate);
    ap.burst_len = w.number(j, "workload.arrival.burst_len", ap.burst_len);
    ap.gap_len = w.number(j, "workload.arrival.gap_len", ap.gap_len);
  } else {
    w.error("workload.arrival.process",
            "unknown process '" + process +
                "' (expected poisson | deterministic | bursty)");
  }
  return ap;
}

DemandDist parse_demand_dist(const json& j, const std::string& path, Walker& w) {
  DemandDist d;
  if (!j.is_object()) {
    w.error(path, "expected an object");
    return d;
  }
  std::string dist = w.str(j, path + ".dist", "exponential");
  if (dist == "constant") {
    d.kind = DemandDist::Kind::kConstant;
    d.value = w.number(j, path + ".value", d.value);
  } else if (dist == "exponential") {
    d.kind = DemandDist::Kind::kExponential;
    d.mean = w.number(j, path + ".mean", d.mean);
  } else if (dist == "lognormal") {
    d.kind = DemandDist::Kind::kLognormal;
    d.mu = w.number(j, path + ".mu", d.mu);
    d.sigma = w.number(j, path + ".sigma", d.sigma);
  } else {
    w.error(path + ".dist",
            "unknown dist '" + dist +
                "' (expected constant | exponential | lognormal)");
  }
  return d;
}

WorkloadConfig parse_workload(const json& j, Walker& w) {
  WorkloadConfig cfg;
  if (j.is_null()) return cfg;
  if (!w.expect_object(j, "workload")) return cfg;
  cfg.horizon = w.number(j, "workload.horizon", cfg.horizon);
  cfg.seed = static_cast<std::uint64_t>(
      w.integer(j, "workload.seed", static_cast<std::int64_t>(cfg.seed)));
  if (j.contains("arrival")) cfg.arrival = parse_arrival(j.at("arrival"), w);
  if (j.contains("type_mix")) {
    const json& mix = j.at("type_mix");
    if (!mix.is_object()) {
      w.error("workload.type_mix", "expected an object");
    } else {
      cfg.type_mix.fill(0.0);
      for (const auto& [key, value] : mix.items()) {
        auto t = parse_request_type(key);
        if (!t) {
          w.error("workload.type_mix." + key, "unknown request type");
          continue;
        }
        if (!value.is_number()) {
          w.error("workload.type_mix." + key, "expected a number");
          continue;
        }
        cfg.type_mix[static_cast<int>(*t)] = value.get<double>();
      }
    }
  }
  if (j.contains("demand")) {
    const json& dem = j.at("demand");
    if (!dem.is_object()) {
      w.error("workload.demand", "expected an object");
    } else {
      if (dem.contains("default")) {
        DemandDist def =
            parse_demand_dist(dem.at("default"), "workload.demand.default", w);
        cfg.demand.fill(def);
      }
      for (const auto& [key, value] : dem.items()) {
        if (key == "default") continue;
        auto t = parse_request_type(key);
        if (!t) {
          w.error("workload.demand." + key, "unknown request type");
          continue;
        }
        cfg.demand[static_cast<int>(*t)] =
            parse_demand_dist(value, "workload.demand." + key, w);
      }
    }
  }
  cfg.secured_fraction =
      w.number(j, "workload.secured_fraction", cfg.secured_fraction);
  if (j.contains("priority_map")) {
    const json& pm = j.at("priority_map");
    if (!pm.is_object()) {
      w.error("workload.priority_map", "expected an object");
    } else {
      for (const auto& [key, value] : pm.items()) {
        auto t = parse_request_type(key);
        if (!t) {
          w.error("workload.priority_map." + key, "unknown request type");
          continue;
        }
        if (!value.is_number_integer()) {
          w.error("workload.priority_map." + key, "expected an integer");
          continue;
        }
        cfg.priority_map[static_cast<int>(*t)] = value.get<int>();
      }
    }
  }
  if (j.contains("url_paths")) {
    const json& up = j.at("url_paths");
    if (up.is_number_integer()) {
      int n = up.get<int>();
      if (n < 1) {
        w.error("workload.url_paths", "count must be >= 1");
      } else {
        cfg.url_paths.clear();
        for (int i = 0; i < n; ++i) {
          cfg.url_paths.push_back("/app/resource" + std::to_string(i));
        }
      }
    } else if (up.is_array()) {
      cfg.url_paths.clear();
      for (const auto& p : up) {
        if (!p.is_string()) {
          w.error("workload.url_paths", "expected strings");
          continue;
        }
        cfg.url_paths.push_back(p.get<std::string>());
      }
    } else {
      w.error("workload.url_paths", "expected an integer count or a string list");
    }
  }
  cfg.source_ip_count = static_cast<std::uint32_t>(w.integer(
      j, "workload.source_ip_count", cfg.source_ip_count));
  return cfg;
}

SupervisorConfig parse_supervisor(const json& j, Walker& w) {
  SupervisorConfig cfg;
  if (j.is_null()) return cfg;
  if (!w.expect_object(j, "supervisor")) return cfg;
  cfg.t_pull = w.number(j, "supervisor.t_pull", cfg.t_pull);
  cfg.reward_grant = static_cast<int>(
      w.integer(j, "supervisor.reward_grant", cfg.reward_grant));
  cfg.penalty = static_cast<int>(w.integer(j, "supervisor.penalty", cfg.penalty));
  cfg.credit_cap =
      static_cast<int>(w.integer(j, "supervisor.credit_cap", cfg.credit_cap));
  cfg.evict_floor =
      static_cast<int>(w.integer(j, "supervisor.evict_floor", cfg.evict_floor));
  cfg.evict_patience = static_cast<int>(
      w.integer(j, "supervisor.evict_patience", cfg.evict_patience));
  cfg.tick_interval =
      w.number(j, "supervisor.tick_interval", cfg.tick_interval);
  cfg.q_alpha = w.number(j, "supervisor.q_alpha", cfg.q_alpha);
  cfg.q_gamma = w.number(j, "supervisor.q_gamma", cfg.q_gamma);
  if (j.contains("epsilon")) {
    const json& e = j.at("epsilon");
    if (!e.is_object()) {
      w.error("supervisor.epsilon", "expected an object");
    } else {
      cfg.epsilon.initial =
          w.number(e, "supervisor.epsilon.initial", cfg.epsilon.initial);
      cfg.epsilon.decay =
          w.number(e, "supervisor.epsilon.decay", cfg.epsilon.decay);
      cfg.epsilon.floor =
          w.number(e, "supervisor.epsilon.floor", cfg.epsilon.floor);
    }
  }
  return cfg;
}

}  // namespace

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  cfg.queues.push_back(QueueSpec{"Q0", 10000});
  ClassificationRule catch_all;
  catch_all.rank = 99;
  catch_all.queue_id = "Q0";
  cfg.rules.push_back(catch_all);
  cfg.farm.push_back(ServerSpec{"s1", 1.0, 1, 1, {}});
  cfg.farm.push_back(ServerSpec{"s2", 2.0, 2, 2, {}});
  cfg.farm.push_back(ServerSpec{"s3", 4.0, 4, 4, {}});
  return cfg;
}

ParseResult parse_scenario(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    // Re-parse with exceptions for the position info.
    try {
      json::parse(text);
    } catch (const json::parse_error& e) {
      return ParseResult{std::nullopt, {std::string("syntax error: ") + e.what()}};
    }
    return ParseResult{std::nullopt, {"syntax error"}};
  }
  return scenario_from_json(j);
}

ParseResult scenario_from_json(const json& j) {
  std::vector<std::string> errors;
  Walker w(errors);
  ScenarioConfig cfg = default_scenario();
  if (!j.is_object()) {
    return ParseResult{std::nullopt, {"scenario: expected a JSON object"}};
  }

  cfg.run_id = w.str(j, "run_id", "");
  std::string mode = w.str(j, "mode", "pull_rl");
  if (mode == "pull_rl") {
    cfg.mode = Mode::kPullRl;
  } else if (mode == "push") {
    cfg.mode = Mode::kPush;
  } else {
    w.error("mode", "unknown mode '" + mode + "' (expected pull_rl | push)");
  }
  if (j.contains("policy")) {
    std::string policy = w.str(j, "policy", "rr");
    auto tag = parse_policy_tag(policy);
    if (!tag) {
      w.error("policy", "unknown policy '" + policy + "'");
    } else {
      cfg.policy = *tag;
    }
    if (cfg.mode == Mode::kPullRl) {
      w.error("policy", "only valid in push mode");
    }
  } else if (cfg.mode == Mode::kPush) {
    w.error("policy", "required in push mode");
  }
  if (j.contains("supervisor") && cfg.mode == Mode::kPush) {
    w.error("supervisor", "only valid in pull_rl mode");
  }

  if (j.contains("workload")) cfg.workload = parse_workload(j.at("workload"), w);
  if (j.contains("admission")) {
    const json& adm = j.at("admission");
    if (w.expect_object(adm, "admission")) {
      cfg.admission.ssl_offload_delay = w.number(
          adm, "admission.ssl_offload_delay", cfg.admission.ssl_offload_delay);
    }
  }
  if (j.contains("queues")) {
    const json& queues = j.at("queues");
    if (!queues.is_array()) {
      w.error("queues", "expected an array");
    } else {
      cfg.queues.clear();
      for (std::size_t i = 0; i < queues.size(); ++i) {
        const json& q = queues[i];
        std::string path = "queues[" + std::to_string(i) + "]";
        if (!w.expect_object(q, path)) continue;
        QueueSpec spec;
        spec.id = w.str(q, path + ".id", "");
        if (spec.id.empty()) w.error(path + ".id", "required");
        spec.capacity = static_cast<std::uint64_t>(w.integer(
            q, path + ".capacity", static_cast<std::int64_t>(spec.capacity)));
        cfg.queues.push_back(std::move(spec));
      }
    }
  }
  if (j.contains("rules")) {
    const json& rules = j.at("rules");
    if (!rules.is_array()) {
      w.error("rules", "expected an array");
    } else {
      cfg.rules.clear();
      for (std::size_t i = 0; i < rules.size(); ++i) {
        const json& r = rules[i];
        std::string path = "rules[" + std::to_string(i) + "]";
        if (!w.expect_object(r, path)) continue;
        ClassificationRule rule;
        rule.rank = static_cast<int>(w.integer(r, path + ".rank", 0));
        rule.queue_id = w.str(r, path + ".queue", "");
        if (rule.queue_id.empty()) w.error(path + ".queue", "required");
        if (r.contains("rtype")) {
          std::string name = w.str(r, path + ".rtype", "");
          auto t = parse_request_type(name);
          if (!t) {
            w.error(path + ".rtype", "unknown request type '" + name + "'");
          } else {
            rule.rtype = *t;
          }
        }
        if (r.contains("priority")) {
          rule.priority = static_cast<int>(w.integer(r, path + ".priority", 0));
        }
        if (r.contains("url_prefix")) {
          rule.url_prefix = w.str(r, path + ".url_prefix", "");
        }
        cfg.rules.push_back(std::move(rule));
      }
    }
  }
  if (j.contains("farm")) {
    const json& farm = j.at("farm");
    if (!farm.is_array()) {
      w.error("farm", "expected an array");
    } else {
      cfg.farm.clear();
      for (std::size_t i = 0; i < farm.size(); ++i) {
        const json& s = farm[i];
        std::string path = "farm[" + std::to_string(i) + "]";
        if (!w.expect_object(s, path)) continue;
        ServerSpec spec;
        spec.id = w.str(s, path + ".id", "");
        if (spec.id.empty()) w.error(path + ".id", "required");
        spec.base_rate = w.number(s, path + ".base_rate", spec.base_rate);
        spec.concurrency =
            static_cast<int>(w.integer(s, path + ".concurrency", spec.concurrency));
        spec.weight = static_cast<int>(w.integer(s, path + ".weight", spec.weight));
        if (s.contains("subscription")) {
          const json& sub = s.at("subscription");
          if (!sub.is_array()) {
            w.error(path + ".subscription", "expected an array");
          } else {
            for (const auto& qid : sub) {
              if (!qid.is_string()) {
                w.error(path + ".subscription", "expected strings");
                continue;
              }
              spec.subscription.push_back(qid.get<std::string>());
            }
          }
        }
        cfg.farm.push_back(std::move(spec));
      }
    }
  }
  if (j.contains("supervisor")) {
    cfg.supervisor = parse_supervisor(j.at("supervisor"), w);
  }
  cfg.kappa = w.number(j, "kappa", cfg.kappa);
  cfg.epoch_dt = w.number(j, "epoch_dt", cfg.epoch_dt);
  if (j.contains("faults")) {
    const json& faults = j.at("faults");
    if (!faults.is_array()) {
      w.error("faults", "expected an array");
    } else {
      for (std::size_t i = 0; i < faults.size(); ++i) {
        const json& f = faults[i];
        std::string path = "faults[" + std::to_string(i) + "]";
        if (!w.expect_object(f, path)) continue;
        FaultSpec spec;
        spec.time = w.number(f, path + ".time", 0.0);
        spec.server = w.str(f, path + ".server", "");
        if (spec.server.empty()) w.error(path + ".server", "required");
        spec.factor = w.number(f, path + ".factor", 1.0);
        cfg.faults.push_back(std::move(spec));
      }
    }
  }
  cfg.metrics_interval =
      w.number(j, "metrics_interval", cfg.metrics_interval);

  auto semantic = validate_scenario(cfg);
  errors.insert(errors.end(), semantic.begin(), semantic.end());
  if (!errors.empty()) return ParseResult{std::nullopt, std::move(errors)};
  return ParseResult{std::move(cfg), {}};
}

std::vector<std::string> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<std::string> errors = validate_workload(cfg.workload);

  if (!(cfg.admission.ssl_offload_delay >= 0.0)) {
    errors.push_back("admission.ssl_offload_delay: must be >= 0");
  }
  if (cfg.queues.empty()) errors.push_back("queues: must not be empty");
  std::vector<std::string> queue_ids;
  std::set<std::string> seen_queues;
  for (const auto& q : cfg.queues) {
    if (!seen_queues.insert(q.id).second) {
      errors.push_back("queues: duplicate id '" + q.id + "'");
    }
    queue_ids.push_back(q.id);
  }
  auto rule_errors = RuleSet::validate(cfg.rules, queue_ids);
  errors.insert(errors.end(), rule_errors.begin(), rule_errors.end());

  if (cfg.farm.empty()) errors.push_back("farm: must not be empty");
  std::set<std::string> seen_servers;
  for (const auto& s : cfg.farm) {
    std::string path = "farm." + s.id;
    if (!seen_servers.insert(s.id).second) {
      errors.push_back("farm: duplicate id '" + s.id + "'");
    }
    if (!(s.base_rate > 0.0)) errors.push_back(path + ".base_rate: must be > 0");
    if (s.concurrency < 1) errors.push_back(path + ".concurrency: must be >= 1");
    if (s.weight < 1) errors.push_back(path + ".weight: must be >= 1");
    for (const auto& qid : s.subscription) {
      if (!seen_queues.count(qid)) {
        errors.push_back(path + ".subscription: unknown queue '" + qid + "'");
      }
    }
  }
  if (cfg.mode == Mode::kPullRl) {
    auto sup_errors = validate_supervisor(cfg.supervisor);
    errors.insert(errors.end(), sup_errors.begin(), sup_errors.end());
    if (!(cfg.kappa >= 0.0)) errors.push_back("kappa: must be >= 0");
    if (!(cfg.epoch_dt > 0.0)) errors.push_back("epoch_dt: must be > 0");
  }
  for (std::size_t i = 0; i < cfg.faults.size(); ++i) {
    const auto& f = cfg.faults[i];
    std::string path = "faults[" + std::to_string(i) + "]";
    if (!(f.time >= 0.0)) errors.push_back(path + ".time: must be >= 0");
    if (!(f.factor > 0.0 && f.factor <= 1.0)) {
      errors.push_back(path + ".factor: must be in (0, 1]");
    }
    if (!seen_servers.count(f.server)) {
      errors.push_back(path + ".server: unknown server '" + f.server + "'");
    }
  }
  if (!(cfg.metrics_interval > 0.0)) {
    errors.push_back("metrics_interval: must be > 0");
  }
  return errors;
}

nlohmann::ordered_json normalize_scenario(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  if (!cfg.run_id.empty()) j["run_id"] = cfg.run_id;
  j["mode"] = cfg.mode == Mode::kPullRl ? "pull_rl" : "push";
  if (cfg.mode == Mode::kPush) j["policy"] = std::string(to_string(cfg.policy));

  nlohmann::ordered_json wl;
  wl["horizon"] = cfg.workload.horizon;
  wl["seed"] = cfg.workload.seed;
  nlohmann::ordered_json arr;
  switch (cfg.workload.arrival.kind) {
    case ArrivalProcess::Kind::kPoisson:
      arr["process"] = "poisson";
      arr["rate"] = cfg.workload.arrival.rate;
      break;
    case ArrivalProcess::Kind::kDeterministic:
      arr["process"] = "deterministic";
      arr["interval"] = cfg.workload.arrival.interval;
      break;
    case ArrivalProcess::Kind::kBursty:
      arr["process"] = "bursty";
      arr["base_rate"] = cfg.workload.arrival.base_rate;
      arr["burst_rate"] = cfg.workload.arrival.burst_rate;
      arr["burst_len"] = cfg.workload.arrival.burst_len;
      arr["gap_len"] = cfg.workload.arrival.gap_len;
      break;
  }
  wl["arrival"] = std::move(arr);
  nlohmann::ordered_json mix;
  for (RequestType t : all_request_types()) {
    mix[std::string(to_string(t))] = cfg.workload.type_mix[static_cast<int>(t)];
  }
  wl["type_mix"] = std::move(mix);
  nlohmann::ordered_json demand;
  for (RequestType t : all_request_types()) {
    const DemandDist& d = cfg.workload.demand[static_cast<int>(t)];
    nlohmann::ordered_json dd;
    switch (d.kind) {
      case DemandDist::Kind::kConstant:
        dd["dist"] = "constant";
        dd["value"] = d.value;
        break;
      case DemandDist::Kind::kExponential:
        dd["dist"] = "exponential";
        dd["mean"] = d.mean;
        break;
      case DemandDist::Kind::kLognormal:
        dd["dist"] = "lognormal";
        dd["mu"] = d.mu;
        dd["sigma"] = d.sigma;
        break;
    }
    demand[std::string(to_string(t))] = std::move(dd);
  }
  wl["demand"] = std::move(demand);
  wl["secured_fraction"] = cfg.workload.secured_fraction;
  nlohmann::ordered_json pm;
  for (RequestType t : all_request_types()) {
    pm[std::string(to_string(t))] = cfg.workload.priority_map[static_cast<int>(t)];
  }
  wl["priority_map"] = std::move(pm);
  wl["url_paths"] = cfg.workload.url_paths;
  wl["source_ip_count"] = cfg.workload.source_ip_count;
  j["workload"] = std::move(wl);

  j["admission"] = {{"ssl_offload_delay", cfg.admission.ssl_offload_delay}};

  auto queues = nlohmann::ordered_json::array();
  for (const auto& q : cfg.queues) {
    queues.push_back({{"id", q.id}, {"capacity", q.capacity}});
  }
  j["queues"] = std::move(queues);

  auto rules = nlohmann::ordered_json::array();
  for (const auto& r : cfg.rules) {
    nlohmann::ordered_json rule = {{"rank", r.rank}, {"queue", r.queue_id}};
    if (r.rtype) rule["rtype"] = std::string(to_string(*r.rtype));
    if (r.priority) rule["priority"] = *r.priority;
    if (r.url_prefix) rule["url_prefix"] = *r.url_prefix;
    rules.push_back(std::move(rule));
  }
  j["rules"] = std::move(rules);

  auto farm = nlohmann::ordered_json::array();
  for (const auto& s : cfg.farm) {
    nlohmann::ordered_json server = {{"id", s.id},
                                     {"base_rate", s.base_rate},
                                     {"concurrency", s.concurrency},
                                     {"weight", s.weight}};
    if (!s.subscription.empty()) server["subscription"] = s.subscription;
    farm.push_back(std::move(server));
  }
  j["farm"] = std::move(farm);

  if (cfg.mode == Mode::kPullRl) {
    const SupervisorConfig& s = cfg.supervisor;
    j["supervisor"] = {{"t_pull", s.t_pull},
                       {"reward_grant", s.reward_grant},
                       {"penalty", s.penalty},
                       {"credit_cap", s.credit_cap},
                       {"evict_floor", s.evict_floor},
                       {"evict_patience", s.evict_patience},
                       {"tick_interval", s.tick_interval},
                       {"q_alpha", s.q_alpha},
                       {"q_gamma", s.q_gamma},
                       {"epsilon",
                        {{"initial", s.epsilon.initial},
                         {"decay", s.epsilon.decay},
                         {"floor", s.epsilon.floor}}}};
    j["kappa"] = cfg.kappa;
    j["epoch_dt"] = cfg.epoch_dt;
  }
  if (!cfg.faults.empty()) {
    auto faults = nlohmann::ordered_json::array();
    for (const auto& f : cfg.faults) {
      faults.push_back(
          {{"time", f.time}, {"server", f.server}, {"factor", f.factor}});
    }
    j["faults"] = std::move(faults);
  }
  j["metrics_interval"] = cfg.metrics_interval;
  return j;
}

}  // namespace lbsim
