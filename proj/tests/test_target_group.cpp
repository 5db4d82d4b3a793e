#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "lbsim/target_group.hpp"

using namespace lbsim;

namespace {

ServerState make_server(double base_rate = 1.0, int concurrency = 1) {
  ServerState s;
  s.id = "s1";
  s.base_rate = base_rate;
  s.concurrency_limit = concurrency;
  s.subscription = {"Q0"};
  return s;
}

}  // namespace

TEST_CASE("effective_rate formula") {
  ServerState s = make_server(2.0);
  CHECK(effective_rate(s, 0.1) == doctest::Approx(2.0));  // zero credits

  s.credits = 5;
  CHECK(effective_rate(s, 0.1) == doctest::Approx(3.0));

  s.degrade_factor = 0.5;
  CHECK(effective_rate(s, 0.1) == doctest::Approx(1.5));

  CHECK(effective_rate(s, 0.0) == doctest::Approx(1.0));  // kappa 0

  s.alive = false;
  CHECK_THROWS_AS(effective_rate(s, 0.1), std::logic_error);
}

TEST_CASE("effective_rate is strictly increasing in credits for kappa > 0") {
  ServerState s = make_server(1.5);
  double prev = -1.0;
  for (int c = 0; c <= 20; ++c) {
    s.credits = c;
    double rate = effective_rate(s, 0.05);
    CHECK(rate > prev);
    prev = rate;
  }
}

TEST_CASE("service completion time is demand over effective rate") {
  ServerState s = make_server(2.0);
  CHECK(service_completion_time(s, 4.0, 10.0, 0.0) == doctest::Approx(12.0));

  s.in_service.insert(7);
  CHECK_THROWS_AS(service_completion_time(s, 1.0, 0.0, 0.0), std::logic_error);
}

TEST_CASE("depth bucketization boundaries") {
  CHECK(bucket_depth(0) == 0);
  CHECK(bucket_depth(1) == 1);
  CHECK(bucket_depth(3) == 1);
  CHECK(bucket_depth(4) == 2);
  CHECK(bucket_depth(7) == 2);
  CHECK(bucket_depth(10) == 2);
  CHECK(bucket_depth(11) == 3);
  CHECK(bucket_depth(100000) == 3);
  // idempotent over the bucket representatives
  for (std::size_t n : {0ul, 1ul, 3ul, 4ul, 10ul, 11ul}) {
    int b = bucket_depth(n);
    CHECK(b >= 0);
    CHECK(b <= 3);
    CHECK(bucket_depth(n) == b);
  }
}

TEST_CASE("credit bucketization covers thirds of the cap") {
  CHECK(bucket_credits(0, 20) == 0);
  CHECK(bucket_credits(6, 20) == 0);
  CHECK(bucket_credits(7, 20) == 1);
  CHECK(bucket_credits(13, 20) == 1);
  CHECK(bucket_credits(14, 20) == 2);
  CHECK(bucket_credits(20, 20) == 2);
  for (int c = 0; c <= 20; ++c) {
    int b = bucket_credits(c, 20);
    CHECK(b >= 0);
    CHECK(b <= 2);
  }
}

TEST_CASE("agent_observe composes the three buckets") {
  QueueTier tier;
  tier.add_queue("Q0", 0);
  ServerState s = make_server();

  Observation obs = agent_observe(s, tier, 20);
  CHECK(obs.depth_bucket == 0);
  CHECK(obs.backlog_bucket == 0);
  CHECK(obs.credit_bucket == 0);

  for (std::uint64_t i = 0; i < 7; ++i) tier.enqueue("Q0", i, 0.0);
  s.backlog = {100, 101};
  s.credits = 15;
  obs = agent_observe(s, tier, 20);
  CHECK(obs.depth_bucket == 2);  // depth 7 falls in 4-10
  CHECK(obs.backlog_bucket == 1);
  CHECK(obs.credit_bucket == 2);
  CHECK(obs.index() >= 0);
  CHECK(obs.index() < Observation::kNumStates);
}

TEST_CASE("observation indices are unique") {
  std::map<int, int> seen;
  for (int d = 0; d < 4; ++d) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 3; ++c) {
        Observation obs{d, b, c};
        CHECK(seen.insert({obs.index(), 1}).second);
      }
    }
  }
  CHECK(seen.size() == Observation::kNumStates);
}

TEST_CASE("agent_decide greedy path") {
  PolicyState p(Observation::kNumStates, kNumActions, 0.0);
  Observation obs{0, 0, 0};
  Rng rng(1);

  SUBCASE("argmax forced") {
    p.q_at(obs.index(), 1) = 1.0;
    p.q_at(obs.index(), 2) = 0.5;
    CHECK(agent_decide(obs, p, rng) == 1);
    CHECK(kPullBatches[1] == 1);
  }
  SUBCASE("all-zero table ties to batch 0") {
    CHECK(agent_decide(obs, p, rng) == 0);
    CHECK(kPullBatches[0] == 0);
  }
  SUBCASE("deterministic given equal rng state") {
    p.epsilon = 0.7;
    Rng a(5), b(5);
    for (int i = 0; i < 200; ++i) {
      CHECK(agent_decide(obs, p, a) == agent_decide(obs, p, b));
    }
  }
}

TEST_CASE("epsilon 1 explores uniformly") {
  PolicyState p(Observation::kNumStates, kNumActions, 1.0);
  Observation obs{0, 0, 0};
  Rng rng(77);
  std::array<int, kNumActions> counts{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[agent_decide(obs, p, rng)];
  // multinomial: sd of each frequency = sqrt(p(1-p)/n), p = 0.2
  double sd = std::sqrt(0.2 * 0.8 / n);
  for (int a = 0; a < kNumActions; ++a) {
    double freq = static_cast<double>(counts[a]) / n;
    CHECK(std::abs(freq - 0.2) <= 3.0 * sd);
  }
}

TEST_CASE("build_report aggregation") {
  SUBCASE("empty window") {
    AgentReport r = build_report("s1", {}, {}, 0.0, 1.0);
    CHECK(r.completed == 0);
    CHECK(r.mean_processing_time == 0.0);
    CHECK(r.max_pull_wait == 0.0);
    CHECK(r.pulls == 0);
  }
  SUBCASE("mean over completions") {
    std::vector<CompletionEvent> c = {{0.5, 1.0}, {0.7, 3.0}};
    AgentReport r = build_report("s1", c, {}, 0.0, 1.0);
    CHECK(r.completed == 2);
    CHECK(r.mean_processing_time == doctest::Approx(2.0));
  }
  SUBCASE("inverted window throws") {
    CHECK_THROWS_AS(build_report("s1", {}, {}, 1.0, 1.0), std::invalid_argument);
  }
  SUBCASE("randomized logs match brute-force aggregation") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<CompletionEvent> completions;
      std::vector<PullEvent> pulls;
      for (int i = 0; i < 40; ++i) {
        completions.push_back({rng.uniform() * 10.0, rng.uniform() * 2.0});
        pulls.push_back({rng.uniform() * 10.0, rng.uniform() * 1.0});
      }
      double w0 = rng.uniform() * 5.0;
      double w1 = w0 + 0.1 + rng.uniform() * 5.0;
      AgentReport r = build_report("s1", completions, pulls, w0, w1);

      std::uint64_t completed = 0, pull_count = 0;
      double total = 0.0, max_wait = 0.0;
      for (const auto& c : completions) {
        if (c.time >= w0 && c.time < w1) {
          ++completed;
          total += c.processing_time;
        }
      }
      for (const auto& p : pulls) {
        if (p.time >= w0 && p.time < w1) {
          ++pull_count;
          max_wait = std::max(max_wait, p.wait);
        }
      }
      CHECK(r.completed == completed);
      CHECK(r.pulls == pull_count);
      CHECK(r.max_pull_wait == max_wait);
      if (completed > 0) {
        CHECK(r.mean_processing_time == doctest::Approx(total / completed));
      } else {
        CHECK(r.mean_processing_time == 0.0);
      }
    }
  }
}
