#include "lbsim/workload.hpp"

#include <cmath>
#include <stdexcept>

namespace lbsim {

namespace {

constexpr std::array<std::string_view, kNumRequestTypes> kTypeNames{
    "GET", "POST", "PUT", "EMAIL", "CHAT", "UPLOAD", "DOWNLOAD", "SYNC"};

}  // namespace

std::optional<RequestType> parse_request_type(std::string_view s) {
  for (int i = 0; i < kNumRequestTypes; ++i) {
    if (s == kTypeNames[i]) return static_cast<RequestType>(i);
  }
  return std::nullopt;
}

std::string_view to_string(RequestType t) {
  return kTypeNames[static_cast<int>(t)];
}

const std::array<RequestType, kNumRequestTypes>& all_request_types() {
  static const std::array<RequestType, kNumRequestTypes> types = [] {
    std::array<RequestType, kNumRequestTypes> a{};
    for (int i = 0; i < kNumRequestTypes; ++i) a[i] = static_cast<RequestType>(i);
    return a;
  }();
  return types;
}

std::array<int, kNumRequestTypes> default_priority_map() {
  std::array<int, kNumRequestTypes> m{};
  m[static_cast<int>(RequestType::kChat)] = 0;
  m[static_cast<int>(RequestType::kGet)] = 1;
  m[static_cast<int>(RequestType::kPost)] = 1;
  m[static_cast<int>(RequestType::kPut)] = 1;
  m[static_cast<int>(RequestType::kEmail)] = 2;
  m[static_cast<int>(RequestType::kUpload)] = 3;
  m[static_cast<int>(RequestType::kDownload)] = 3;
  m[static_cast<int>(RequestType::kSync)] = 3;
  return m;
}

std::vector<std::string> default_url_paths() {
  std::vector<std::string> paths;
  paths.reserve(16);
  for (int i = 0; i < 16; ++i) {
    paths.push_back("/app/resource" + std::to_string(i));
  }
  return paths;
}

std::vector<std::string> validate_workload(const WorkloadConfig& cfg) {
  std::vector<std::string> errors;
  if (!(cfg.horizon >= 0.0) || !std::isfinite(cfg.horizon)) {
    errors.push_back("workload.horizon: must be finite and >= 0");
  }
  switch (cfg.arrival.kind) {
    case ArrivalProcess::Kind::kPoisson:
      if (!(cfg.arrival.rate > 0.0)) {
        errors.push_back("workload.arrival.rate: must be > 0");
      }
      break;
    case ArrivalProcess::Kind::kDeterministic:
      if (!(cfg.arrival.interval > 0.0)) {
        errors.push_back("workload.arrival.interval: must be > 0");
      }
      break;
    case ArrivalProcess::Kind::kBursty:
      if (!(cfg.arrival.base_rate > 0.0)) {
        errors.push_back("workload.arrival.base_rate: must be > 0");
      }
      if (!(cfg.arrival.burst_rate > 0.0)) {
        errors.push_back("workload.arrival.burst_rate: must be > 0");
      }
      if (!(cfg.arrival.burst_len > 0.0)) {
        errors.push_back("workload.arrival.burst_len: must be > 0");
      }
      if (!(cfg.arrival.gap_len > 0.0)) {
        errors.push_back("workload.arrival.gap_len: must be > 0");
      }
      break;
  }
  double mix_total = 0.0;
  for (int i = 0; i < kNumRequestTypes; ++i) {
    if (cfg.type_mix[i] < 0.0 || !std::isfinite(cfg.type_mix[i])) {
      errors.push_back("workload.type_mix." + std::string(kTypeNames[i]) +
                       ": must be finite and >= 0");
    } else {
      mix_total += cfg.type_mix[i];
    }
  }
  if (!(mix_total > 0.0)) {
    errors.push_back("workload.type_mix: weights must not all be zero");
  }
  for (int i = 0; i < kNumRequestTypes; ++i) {
    const DemandDist& d = cfg.demand[i];
    std::string field = "workload.demand." + std::string(kTypeNames[i]);
    switch (d.kind) {
      case DemandDist::Kind::kConstant:
        if (!(d.value > 0.0)) errors.push_back(field + ".value: must be > 0");
        break;
      case DemandDist::Kind::kExponential:
        if (!(d.mean > 0.0)) errors.push_back(field + ".mean: must be > 0");
        break;
      case DemandDist::Kind::kLognormal:
        if (!std::isfinite(d.mu)) errors.push_back(field + ".mu: must be finite");
        if (!(d.sigma >= 0.0)) errors.push_back(field + ".sigma: must be >= 0");
        break;
    }
  }
  if (!(cfg.secured_fraction >= 0.0 && cfg.secured_fraction <= 1.0)) {
    errors.push_back("workload.secured_fraction: must be in [0, 1]");
  }
  if (cfg.url_paths.empty()) {
    errors.push_back("workload.url_paths: must not be empty");
  }
  if (cfg.source_ip_count == 0) {
    errors.push_back("workload.source_ip_count: must be >= 1");
  }
  return errors;
}

double sample_demand(RequestType rtype, const WorkloadConfig& cfg, Rng& rng) {
  const DemandDist& d = cfg.demand[static_cast<int>(rtype)];
  switch (d.kind) {
    case DemandDist::Kind::kConstant:
      return d.value;
    case DemandDist::Kind::kExponential: {
      double v = rng.exponential(d.mean);
      return v > 0.0 ? v : d.mean * 1e-12;
    }
    case DemandDist::Kind::kLognormal:
      return std::exp(d.mu + d.sigma * rng.normal());
  }
  return 1.0;
}

std::vector<Request> generate_arrivals(const WorkloadConfig& cfg) {
  auto errors = validate_workload(cfg);
  if (!errors.empty()) throw std::invalid_argument(errors.front());

  Rng arrival_rng = Rng::for_stream(cfg.seed, "workload/arrivals");
  Rng type_rng = Rng::for_stream(cfg.seed, "workload/types");
  Rng demand_rng = Rng::for_stream(cfg.seed, "workload/demand");
  Rng path_rng = Rng::for_stream(cfg.seed, "workload/paths");
  Rng ip_rng = Rng::for_stream(cfg.seed, "workload/ips");
  Rng secured_rng = Rng::for_stream(cfg.seed, "workload/secured");

  // Arrival instants first, then per-request attributes.
  std::vector<double> times;
  const ArrivalProcess& ap = cfg.arrival;
  switch (ap.kind) {
    case ArrivalProcess::Kind::kDeterministic: {
      for (double t = ap.interval; t < cfg.horizon; t += ap.interval) {
        times.push_back(t);
      }
      break;
    }
    case ArrivalProcess::Kind::kPoisson: {
      double t = 0.0;
      while (true) {
        t += arrival_rng.exponential(1.0 / ap.rate);
        if (t >= cfg.horizon) break;
        times.push_back(t);
      }
      break;
    }
    case ArrivalProcess::Kind::kBursty: {
      // Alternating phases: burst_len at burst_rate, gap_len at base_rate,
      // Poisson within each phase, starting with a burst.
      double t = 0.0;
      while (t < cfg.horizon) {
        double cycle_pos = std::fmod(t, ap.burst_len + ap.gap_len);
        double rate = cycle_pos < ap.burst_len ? ap.burst_rate : ap.base_rate;
        t += arrival_rng.exponential(1.0 / rate);
        if (t < cfg.horizon) times.push_back(t);
      }
      break;
    }
  }

  std::array<double, kNumRequestTypes> cum{};
  double total = 0.0;
  for (int i = 0; i < kNumRequestTypes; ++i) {
    total += cfg.type_mix[i];
    cum[i] = total;
  }

  std::vector<Request> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    Request r;
    r.id = i;
    r.arrival_time = times[i];
    double u = type_rng.uniform() * total;
    int type_idx = kNumRequestTypes - 1;
    for (int k = 0; k < kNumRequestTypes; ++k) {
      if (u < cum[k]) {
        type_idx = k;
        break;
      }
    }
    r.rtype = static_cast<RequestType>(type_idx);
    r.priority = cfg.priority_map[type_idx];
    std::uint32_t client = ip_rng.uniform_int(cfg.source_ip_count);
    r.source_ip = 0x0a000000u + client;  // 10.x.x.x style synthetic identity
    r.url_path = cfg.url_paths[path_rng.uniform_int(
        static_cast<std::uint32_t>(cfg.url_paths.size()))];
    r.service_demand = sample_demand(r.rtype, cfg, demand_rng);
    r.secured = secured_rng.uniform() < cfg.secured_fraction;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lbsim
