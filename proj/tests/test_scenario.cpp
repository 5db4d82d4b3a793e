#include <doctest.h>

#include "lbsim/scenario.hpp"

using namespace lbsim;

TEST_CASE("minimal pull-mode scenario parses with defaults filled") {
  auto result = parse_scenario(R"({"mode": "pull_rl"})");
  REQUIRE(result.config);
  const auto& cfg = *result.config;
  CHECK(cfg.mode == Mode::kPullRl);
  CHECK(cfg.queues.size() == 1);
  CHECK(cfg.queues[0].id == "Q0");
  CHECK(cfg.farm.size() == 3);
  CHECK(cfg.farm[2].base_rate == 4.0);
  CHECK(cfg.supervisor.credit_cap == 20);
  CHECK(cfg.epoch_dt == 0.1);

  auto dump = normalize_scenario(cfg);
  CHECK(dump["mode"] == "pull_rl");
  CHECK(dump.contains("supervisor"));
}

TEST_CASE("push mode requires a policy") {
  auto result = parse_scenario(R"({"mode": "push"})");
  REQUIRE(!result.config);
  bool found = false;
  for (const auto& e : result.errors) {
    if (e.find("policy") != std::string::npos) found = true;
  }
  CHECK(found);

  result = parse_scenario(R"({"mode": "push", "policy": "wrr"})");
  REQUIRE(result.config);
  CHECK(result.config->policy == PolicyTag::kWeightedRoundRobin);
}

TEST_CASE("mode-specific sections are rejected in the wrong mode") {
  auto result =
      parse_scenario(R"({"mode": "push", "policy": "rr", "supervisor": {}})");
  CHECK(!result.config);

  result = parse_scenario(R"({"mode": "pull_rl", "policy": "rr"})");
  CHECK(!result.config);
}

TEST_CASE("rule referencing an unknown queue is a semantic error") {
  auto result = parse_scenario(R"({
    "mode": "pull_rl",
    "queues": [{"id": "Q0"}],
    "rules": [{"rank": 0, "queue": "Q9"}]
  })");
  REQUIRE(!result.config);
  bool found = false;
  for (const auto& e : result.errors) {
    if (e.find("unknown queue 'Q9'") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_CASE("all validation errors are reported, not just the first") {
  auto result = parse_scenario(R"({
    "mode": "pull_rl",
    "workload": {"horizon": -1, "secured_fraction": 2.0},
    "supervisor": {"t_pull": -0.5},
    "metrics_interval": 0
  })");
  REQUIRE(!result.config);
  CHECK(result.errors.size() >= 4);
}

TEST_CASE("syntax errors carry position info") {
  auto result = parse_scenario("{\"mode\": ");
  REQUIRE(!result.config);
  REQUIRE(result.errors.size() == 1);
  CHECK(result.errors[0].find("syntax error") != std::string::npos);
}

TEST_CASE("normalize dump round trip is a fixed point") {
  const char* scenarios[] = {
      R"({"mode": "pull_rl"})",
      R"({"mode": "push", "policy": "url_hash",
          "workload": {"horizon": 50, "seed": 9,
                       "arrival": {"process": "bursty", "base_rate": 2,
                                   "burst_rate": 20, "burst_len": 1, "gap_len": 4},
                       "secured_fraction": 0.25},
          "queues": [{"id": "A", "capacity": 5}, {"id": "B"}],
          "rules": [{"rank": 0, "queue": "A", "rtype": "EMAIL"},
                    {"rank": 5, "queue": "B"}],
          "farm": [{"id": "x", "base_rate": 3, "concurrency": 2, "weight": 4}],
          "faults": [{"time": 10, "server": "x", "factor": 0.5}]})",
      R"({"mode": "pull_rl",
          "workload": {"demand": {"default": {"dist": "lognormal", "mu": 0.1,
                                              "sigma": 0.3},
                                  "GET": {"dist": "constant", "value": 2}}},
          "supervisor": {"t_pull": 0.25, "epsilon": {"initial": 0.9}},
          "kappa": 0.02, "epoch_dt": 0.05})",
  };
  for (const char* text : scenarios) {
    auto first = parse_scenario(text);
    REQUIRE(first.config);
    auto dump1 = normalize_scenario(*first.config);
    auto second = parse_scenario(dump1.dump());
    REQUIRE(second.config);
    auto dump2 = normalize_scenario(*second.config);
    CHECK(dump1 == dump2);
    CHECK(dump1.dump() == dump2.dump());
  }
}

TEST_CASE("subscription referencing unknown queue is reported with a path") {
  auto result = parse_scenario(R"({
    "mode": "pull_rl",
    "farm": [{"id": "a", "subscription": ["missing"]}]
  })");
  REQUIRE(!result.config);
  bool found = false;
  for (const auto& e : result.errors) {
    if (e.find("farm.a.subscription") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_CASE("type errors name the field") {
  auto result = parse_scenario(R"({"mode": "pull_rl",
                                   "workload": {"horizon": "long"}})");
  REQUIRE(!result.config);
  bool found = false;
  for (const auto& e : result.errors) {
    if (e.find("workload.horizon") != std::string::npos) found = true;
  }
  CHECK(found);
}
