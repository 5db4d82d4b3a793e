#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lbsim/metrics.hpp"
#include "lbsim/rng.hpp"

using namespace lbsim;

TEST_CASE("percentile nearest-rank examples") {
  CHECK(percentile({5.0}, 0.0) == 5.0);
  CHECK(percentile({5.0}, 50.0) == 5.0);
  CHECK(percentile({5.0}, 100.0) == 5.0);
  CHECK(percentile({1, 2, 3, 4}, 50.0) == 2.0);
  CHECK(percentile({1, 2, 3, 4}, 100.0) == 4.0);
  CHECK(percentile({4, 2, 1, 3}, 25.0) == 1.0);  // sorts internally
  CHECK_THROWS_AS(percentile({}, 50.0), std::invalid_argument);
}

TEST_CASE("percentile matches a sort-and-index oracle on random samples") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> samples;
    int n = 1 + rng.uniform_int(50);
    for (int i = 0; i < n; ++i) samples.push_back(rng.uniform() * 100.0);
    double p = rng.uniform() * 100.0;

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    double expect = p == 0.0
                        ? sorted.front()
                        : sorted[static_cast<std::size_t>(
                                     std::ceil(p / 100.0 * n)) - 1];
    CHECK(percentile(samples, p) == expect);
  }
}

TEST_CASE("percentile is monotone in p") {
  Rng rng(6);
  std::vector<double> samples;
  for (int i = 0; i < 37; ++i) samples.push_back(rng.uniform());
  double prev = percentile(samples, 0.0);
  for (double p = 1.0; p <= 100.0; p += 1.0) {
    double v = percentile(samples, p);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("jain fairness formula") {
  CHECK(jain_fairness({3, 3, 3}) == doctest::Approx(1.0));
  CHECK(jain_fairness({1, 0, 0}) == doctest::Approx(1.0 / 3.0));
  CHECK(jain_fairness({1, 2, 3}) == doctest::Approx(6.0 / 7.0));
  CHECK_THROWS_AS(jain_fairness({0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(jain_fairness({}), std::invalid_argument);
}

TEST_CASE("jain stays within [1/n, 1]") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + rng.uniform_int(8);
    std::vector<double> counts;
    bool nonzero = false;
    for (int i = 0; i < n; ++i) {
      counts.push_back(rng.uniform_int(100));
      nonzero = nonzero || counts.back() > 0;
    }
    if (!nonzero) counts[0] = 1;
    double j = jain_fairness(counts);
    CHECK(j >= 1.0 / n - 1e-12);
    CHECK(j <= 1.0 + 1e-12);
  }
}

TEST_CASE("finalize on a zero-traffic run uses absent markers") {
  MetricsAccumulator acc;
  acc.assigned["A"] = 0;
  RunMeta meta{"r0", "push", "rr", 1};
  MetricsReport r = finalize(acc, 5.0, meta);
  CHECK(r.generated == 0);
  CHECK(r.completed == 0);
  CHECK(r.throughput == 0.0);
  CHECK(!r.response_time.present);
  CHECK(!r.dt_present);
  CHECK(!r.jain.has_value());

  auto j = report_to_json(r);
  CHECK(j["response_time"].is_null());
  CHECK(j["jain"].is_null());
  // CSV row has empty stat fields, not zeros
  auto row = report_to_csv_row(r);
  CHECK(row.find(",,,,") != std::string::npos);
}

TEST_CASE("finalize computes throughput and stats") {
  MetricsAccumulator acc;
  acc.generated = 12;
  acc.completed = 10;
  acc.dropped = 2;
  for (int i = 1; i <= 10; ++i) acc.response_times.push_back(i * 0.1);
  acc.assigned["A"] = 6;
  acc.assigned["B"] = 4;
  RunMeta meta{"r1", "push", "rr", 1};
  MetricsReport r = finalize(acc, 5.0, meta);
  CHECK(r.throughput == doctest::Approx(2.0));
  CHECK(r.response_time.present);
  CHECK(r.response_time.mean == doctest::Approx(0.55));
  CHECK(r.response_time.p50 == doctest::Approx(0.5));
  CHECK(r.response_time.max == doctest::Approx(1.0));
  CHECK(r.response_time.p50 <= r.response_time.p95);
  CHECK(r.response_time.p95 <= r.response_time.p99);
  CHECK(r.response_time.p99 <= r.response_time.max);
  CHECK(r.skew == 2);
  REQUIRE(r.jain.has_value());
  CHECK(*r.jain == doctest::Approx(100.0 / (2 * 52.0)));
}

TEST_CASE("csv row has the documented column count and run id") {
  MetricsAccumulator acc;
  acc.generated = 1;
  acc.completed = 1;
  acc.response_times.push_back(0.5);
  acc.distribution_times.push_back(0.1);
  acc.assigned["A"] = 1;
  RunMeta meta{"myrun", "pull_rl", "-", 7};
  MetricsReport r = finalize(acc, 2.0, meta);
  std::string row = report_to_csv_row(r);
  CHECK(row.rfind("myrun,pull_rl,-,7,", 0) == 0);
  auto count_commas = [](const std::string& s) {
    return std::count(s.begin(), s.end(), ',');
  };
  CHECK(count_commas(row) == count_commas(csv_header()));
}

TEST_CASE("format_float uses 6 significant digits and dot separator") {
  CHECK(format_float(2.0) == "2");
  CHECK(format_float(0.123456789) == "0.123457");
  CHECK(format_float(123456.789) == "123457");
  CHECK(format_float(1e-7) == "1e-07");
}
