#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lbsim/engine.hpp"
#include "lbsim/metrics.hpp"
#include "lbsim/scenario.hpp"

namespace {

// Exit codes (documented in the README):
//   0 success, 2 scenario validation error, 3 I/O error,
//   4 simulation invariant violation
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return out.good();
}

int load_scenario(const std::string& path, std::optional<std::uint64_t> seed,
                  lbsim::ScenarioConfig& out) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read scenario file '" << path << "'\n";
    return kExitIo;
  }
  auto result = lbsim::parse_scenario(*text);
  if (!result.config) {
    std::cerr << "invalid scenario '" << path << "':\n";
    for (const auto& e : result.errors) std::cerr << "  " << e << "\n";
    return kExitValidation;
  }
  out = *result.config;
  if (seed) out.workload.seed = *seed;
  return 0;
}

int write_run_outputs(const lbsim::RunResult& result, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '" << out_dir << "'\n";
    return kExitIo;
  }
  const std::string base = out_dir + "/" + result.report.run_id;
  bool ok = write_file(base + ".events.jsonl", result.log.to_jsonl());
  ok = ok && write_file(base + ".report.json",
                        lbsim::report_to_json(result.report).dump(2) + "\n");
  ok = ok && write_file(base + ".report.csv",
                        lbsim::csv_header() + "\n" +
                            lbsim::report_to_csv_row(result.report) + "\n");
  if (!ok) {
    std::cerr << "error: failed writing outputs under '" << out_dir << "'\n";
    return kExitIo;
  }
  return 0;
}

int cmd_validate(const std::string& scenario_path) {
  lbsim::ScenarioConfig cfg;
  int rc = load_scenario(scenario_path, std::nullopt, cfg);
  if (rc != 0) return rc;
  std::cout << lbsim::normalize_scenario(cfg).dump(2) << "\n";
  return 0;
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir) {
  lbsim::ScenarioConfig cfg;
  int rc = load_scenario(scenario_path, seed, cfg);
  if (rc != 0) return rc;
  try {
    lbsim::RunResult result = lbsim::run_scenario(cfg);
    rc = write_run_outputs(result, out_dir);
    if (rc != 0) return rc;
    std::cout << lbsim::csv_header() << "\n"
              << lbsim::report_to_csv_row(result.report) << "\n";
    return 0;
  } catch (const lbsim::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    return kExitValidation;
  }
}

int cmd_compare(const std::string& scenario_path,
                const std::vector<std::string>& policies,
                const std::vector<std::uint64_t>& seeds,
                const std::string& out_dir) {
  if (policies.size() < 2) {
    std::cerr << "error: compare needs at least 2 policies\n";
    return kExitValidation;
  }
  if (seeds.empty()) {
    std::cerr << "error: compare needs at least 1 seed\n";
    return kExitValidation;
  }
  lbsim::ScenarioConfig base;
  int rc = load_scenario(scenario_path, std::nullopt, base);
  if (rc != 0) return rc;

  std::vector<lbsim::MetricsReport> reports;
  for (const auto& policy : policies) {
    for (std::uint64_t seed : seeds) {
      lbsim::ScenarioConfig cfg = base;
      cfg.workload.seed = seed;
      cfg.run_id.clear();
      if (policy == "pull_rl") {
        cfg.mode = lbsim::Mode::kPullRl;
      } else {
        auto tag = lbsim::parse_policy_tag(policy);
        if (!tag) {
          std::cerr << "error: unknown policy '" << policy << "'\n";
          return kExitValidation;
        }
        cfg.mode = lbsim::Mode::kPush;
        cfg.policy = *tag;
      }
      try {
        reports.push_back(lbsim::run_scenario(cfg).report);
      } catch (const lbsim::InvariantViolation& e) {
        std::cerr << "invariant violation in " << policy << " seed " << seed
                  << ": " << e.what() << "\n";
        return kExitInvariant;
      } catch (const std::invalid_argument& e) {
        std::cerr << "invalid sub-run " << policy << " seed " << seed << ": "
                  << e.what() << "\n";
        return kExitValidation;
      }
    }
  }

  std::ostringstream csv;
  csv << lbsim::csv_header() << "\n";
  for (const auto& r : reports) csv << lbsim::report_to_csv_row(r) << "\n";
  // Per-policy summary rows: means over seeds of the numeric columns.
  std::size_t per_policy = seeds.size();
  for (std::size_t p = 0; p < policies.size(); ++p) {
    double gen = 0, comp = 0, drop = 0, thr = 0, rt_mean = 0, rt_p50 = 0,
           rt_p95 = 0, rt_p99 = 0, dt_mean = 0, dt_p95 = 0, skew = 0, jain = 0,
           evict = 0;
    std::size_t rt_n = 0, dt_n = 0, jain_n = 0;
    for (std::size_t s = 0; s < per_policy; ++s) {
      const auto& r = reports[p * per_policy + s];
      gen += r.generated;
      comp += r.completed;
      drop += r.dropped;
      thr += r.throughput;
      if (r.response_time.present) {
        rt_mean += r.response_time.mean;
        rt_p50 += r.response_time.p50;
        rt_p95 += r.response_time.p95;
        rt_p99 += r.response_time.p99;
        ++rt_n;
      }
      if (r.dt_present) {
        dt_mean += r.dt_mean;
        dt_p95 += r.dt_p95;
        ++dt_n;
      }
      skew += static_cast<double>(r.skew);
      if (r.jain) {
        jain += *r.jain;
        ++jain_n;
      }
      evict += static_cast<double>(r.evictions.size());
    }
    double n = static_cast<double>(per_policy);
    csv << policies[p] << "-mean," << reports[p * per_policy].mode << ","
        << policies[p] << ",,"
        << lbsim::format_float(gen / n) << "," << lbsim::format_float(comp / n)
        << "," << lbsim::format_float(drop / n) << ","
        << lbsim::format_float(thr / n) << ",";
    csv << (rt_n ? lbsim::format_float(rt_mean / rt_n) : "") << ","
        << (rt_n ? lbsim::format_float(rt_p50 / rt_n) : "") << ","
        << (rt_n ? lbsim::format_float(rt_p95 / rt_n) : "") << ","
        << (rt_n ? lbsim::format_float(rt_p99 / rt_n) : "") << ",";
    csv << (dt_n ? lbsim::format_float(dt_mean / dt_n) : "") << ","
        << (dt_n ? lbsim::format_float(dt_p95 / dt_n) : "") << ",";
    csv << lbsim::format_float(skew / n) << ","
        << (jain_n ? lbsim::format_float(jain / jain_n) : "") << ","
        << lbsim::format_float(evict / n) << "\n";
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !write_file(out_dir + "/compare.csv", csv.str())) {
    std::cerr << "error: failed writing '" << out_dir << "/compare.csv'\n";
    return kExitIo;
  }
  std::cout << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Queue-based pull load-balancing simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  std::vector<std::string> policies;
  std::vector<std::uint64_t> seeds;

  auto* validate = app.add_subcommand("validate", "Parse and echo a scenario");
  validate->add_option("--scenario", scenario_path, "Scenario JSON file")
      ->required();

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  std::uint64_t seed_value = 0;
  auto* seed_opt = run->add_option("--seed", seed_value, "Seed override");
  run->add_option("--out", out_dir, "Output directory");

  auto* compare = app.add_subcommand("compare", "Run a policy x seed grid");
  compare->add_option("--scenario", scenario_path, "Scenario JSON file")
      ->required();
  compare
      ->add_option("--policies", policies,
                   "Policies: pull_rl or push tags (rr, wrr, lc, wlc, adaptive, "
                   "wrt, ip_hash, url_hash, random)")
      ->required()
      ->delimiter(',');
  compare->add_option("--seeds", seeds, "Seeds")->required()->delimiter(',');
  compare->add_option("--out", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(scenario_path);
  if (run->parsed()) {
    if (seed_opt->count() > 0) seed_override = seed_value;
    return cmd_run(scenario_path, seed_override, out_dir);
  }
  return cmd_compare(scenario_path, policies, seeds, out_dir);
}
