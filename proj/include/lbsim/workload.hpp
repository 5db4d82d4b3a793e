#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lbsim/rng.hpp"

namespace lbsim {

enum class RequestType : int {
  kGet = 0,
  kPost,
  kPut,
  kEmail,
  kChat,
  kUpload,
  kDownload,
  kSync,
};

inline constexpr int kNumRequestTypes = 8;

std::optional<RequestType> parse_request_type(std::string_view s);
std::string_view to_string(RequestType t);
const std::array<RequestType, kNumRequestTypes>& all_request_types();

struct Request {
  std::uint64_t id = 0;
  double arrival_time = 0.0;
  RequestType rtype = RequestType::kGet;
  int priority = 0;  // 0 = highest
  std::uint32_t source_ip = 0;
  std::string url_path;
  double service_demand = 0.0;  // work units
  bool secured = false;
};

struct ArrivalProcess {
  enum class Kind { kPoisson, kDeterministic, kBursty };
  Kind kind = Kind::kPoisson;
  double rate = 5.0;        // poisson
  double interval = 1.0;    // deterministic
  double base_rate = 1.0;   // bursty, outside bursts
  double burst_rate = 10.0; // bursty, inside bursts
  double burst_len = 5.0;
  double gap_len = 5.0;
};

struct DemandDist {
  enum class Kind { kConstant, kExponential, kLognormal };
  Kind kind = Kind::kExponential;
  double value = 1.0;  // constant c
  double mean = 1.0;   // exponential
  double mu = 0.0;     // lognormal
  double sigma = 0.0;
};

// CHAT highest, bulk transfer lowest.
std::array<int, kNumRequestTypes> default_priority_map();
std::vector<std::string> default_url_paths();

struct WorkloadConfig {
  double horizon = 100.0;
  ArrivalProcess arrival;
  std::array<double, kNumRequestTypes> type_mix{
      0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125};
  std::array<DemandDist, kNumRequestTypes> demand{};
  double secured_fraction = 0.0;
  std::array<int, kNumRequestTypes> priority_map = default_priority_map();
  std::vector<std::string> url_paths = default_url_paths();
  std::uint32_t source_ip_count = 64;
  std::uint64_t seed = 0;
};

// Empty vector means valid. Each message names the offending field.
std::vector<std::string> validate_workload(const WorkloadConfig& cfg);

double sample_demand(RequestType rtype, const WorkloadConfig& cfg, Rng& rng);

// Seeded, sorted by arrival_time, all arrival_time < horizon. Throws
// std::invalid_argument (first validation message) on an invalid config.
std::vector<Request> generate_arrivals(const WorkloadConfig& cfg);

}  // namespace lbsim
