#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lbsim/workload.hpp"

using namespace lbsim;

namespace {

WorkloadConfig base_config() {
  WorkloadConfig cfg;
  cfg.seed = 17;
  return cfg;
}

}  // namespace

TEST_CASE("deterministic arrivals land on the interval grid") {
  WorkloadConfig cfg = base_config();
  cfg.arrival.kind = ArrivalProcess::Kind::kDeterministic;
  cfg.arrival.interval = 1.0;
  cfg.horizon = 3.5;
  auto reqs = generate_arrivals(cfg);
  REQUIRE(reqs.size() == 3);
  CHECK(reqs[0].arrival_time == doctest::Approx(1.0));
  CHECK(reqs[1].arrival_time == doctest::Approx(2.0));
  CHECK(reqs[2].arrival_time == doctest::Approx(3.0));
}

TEST_CASE("poisson rate zero is rejected") {
  WorkloadConfig cfg = base_config();
  cfg.arrival.rate = 0.0;
  auto errors = validate_workload(cfg);
  REQUIRE(!errors.empty());
  CHECK(errors[0].find("workload.arrival.rate") != std::string::npos);
  CHECK_THROWS_AS(generate_arrivals(cfg), std::invalid_argument);
}

TEST_CASE("poisson count stays within 3 sd of rate * horizon") {
  // Oracle: Poisson(rate * horizon) has mean 5000 and sd sqrt(5000).
  WorkloadConfig cfg = base_config();
  cfg.arrival.rate = 5.0;
  cfg.horizon = 1000.0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    cfg.seed = seed;
    auto reqs = generate_arrivals(cfg);
    double n = static_cast<double>(reqs.size());
    CHECK(std::abs(n - 5000.0) <= 3.0 * std::sqrt(5000.0));
  }
}

TEST_CASE("degenerate type mix forces a single type") {
  WorkloadConfig cfg = base_config();
  cfg.type_mix.fill(0.0);
  cfg.type_mix[static_cast<int>(RequestType::kGet)] = 1.0;
  cfg.arrival.rate = 50.0;
  for (const auto& r : generate_arrivals(cfg)) {
    CHECK(r.rtype == RequestType::kGet);
  }
}

TEST_CASE("sample_demand distributions") {
  WorkloadConfig cfg = base_config();
  Rng rng(1);

  SUBCASE("constant") {
    cfg.demand[0] = DemandDist{DemandDist::Kind::kConstant, 2.5, 0, 0, 0};
    for (int i = 0; i < 10; ++i) {
      CHECK(sample_demand(RequestType::kGet, cfg, rng) == 2.5);
    }
  }
  SUBCASE("exponential mean within 2% over 1e5 samples") {
    cfg.demand[0].kind = DemandDist::Kind::kExponential;
    cfg.demand[0].mean = 1.0;
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += sample_demand(RequestType::kGet, cfg, rng);
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("degenerate lognormal is exactly 1") {
    cfg.demand[0] = DemandDist{DemandDist::Kind::kLognormal, 0, 0, 0.0, 0.0};
    CHECK(sample_demand(RequestType::kGet, cfg, rng) == 1.0);
  }
  SUBCASE("always positive") {
    cfg.demand[0].kind = DemandDist::Kind::kExponential;
    cfg.demand[0].mean = 0.1;
    for (int i = 0; i < 1000; ++i) {
      CHECK(sample_demand(RequestType::kGet, cfg, rng) > 0.0);
    }
  }
}

TEST_CASE("identical config yields a bit-identical sequence") {
  WorkloadConfig cfg = base_config();
  cfg.arrival.rate = 20.0;
  cfg.secured_fraction = 0.3;
  auto a = generate_arrivals(cfg);
  auto b = generate_arrivals(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].arrival_time == b[i].arrival_time);
    CHECK(a[i].rtype == b[i].rtype);
    CHECK(a[i].source_ip == b[i].source_ip);
    CHECK(a[i].url_path == b[i].url_path);
    CHECK(a[i].service_demand == b[i].service_demand);
    CHECK(a[i].secured == b[i].secured);
  }
}

TEST_CASE("arrival times are non-decreasing and below the horizon") {
  WorkloadConfig cfg = base_config();
  cfg.arrival.kind = ArrivalProcess::Kind::kBursty;
  cfg.arrival.base_rate = 1.0;
  cfg.arrival.burst_rate = 30.0;
  cfg.arrival.burst_len = 2.0;
  cfg.arrival.gap_len = 3.0;
  cfg.horizon = 200.0;
  auto reqs = generate_arrivals(cfg);
  REQUIRE(!reqs.empty());
  double prev = 0.0;
  for (const auto& r : reqs) {
    CHECK(r.arrival_time >= prev);
    CHECK(r.arrival_time < cfg.horizon);
    prev = r.arrival_time;
  }
}

TEST_CASE("empirical type frequencies track the mix within 5 points") {
  WorkloadConfig cfg = base_config();
  cfg.arrival.rate = 30.0;
  cfg.horizon = 400.0;  // ~12k requests
  cfg.type_mix = {0.4, 0.2, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05};
  auto reqs = generate_arrivals(cfg);
  REQUIRE(reqs.size() >= 10000);
  std::array<int, kNumRequestTypes> counts{};
  for (const auto& r : reqs) ++counts[static_cast<int>(r.rtype)];
  for (int i = 0; i < kNumRequestTypes; ++i) {
    double freq = static_cast<double>(counts[i]) / reqs.size();
    CHECK(std::abs(freq - cfg.type_mix[i]) < 0.05);
  }
}

TEST_CASE("priority map follows the configured defaults") {
  WorkloadConfig cfg = base_config();
  cfg.arrival.rate = 40.0;
  auto reqs = generate_arrivals(cfg);
  for (const auto& r : reqs) {
    CHECK(r.priority == cfg.priority_map[static_cast<int>(r.rtype)]);
  }
}

TEST_CASE("parse_request_type covers exactly the eight tags") {
  CHECK(parse_request_type("GET") == RequestType::kGet);
  CHECK(parse_request_type("SYNC") == RequestType::kSync);
  CHECK(!parse_request_type("HEAD"));
  CHECK(!parse_request_type("get"));
  for (RequestType t : all_request_types()) {
    CHECK(parse_request_type(to_string(t)) == t);
  }
}
