#include "lbsim/engine.hpp"

#include <algorithm>
#include <cmath>

namespace lbsim {

namespace {
constexpr double kEwmaAlpha = 0.2;
}

std::string derive_run_id(const ScenarioConfig& cfg) {
  if (!cfg.run_id.empty()) return cfg.run_id;
  std::string id = cfg.mode == Mode::kPullRl ? "pull_rl" : "push";
  if (cfg.mode == Mode::kPush) {
    id += '-';
    id += to_string(cfg.policy);
  }
  id += "-s" + std::to_string(cfg.workload.seed);
  return id;
}

Simulation::Simulation(ScenarioConfig cfg)
    : cfg_(std::move(cfg)),
      balancer_rng_(Rng::for_stream(cfg_.workload.seed, "balancer")) {
  auto errors = validate_scenario(cfg_);
  if (!errors.empty()) throw std::invalid_argument(errors.front());

  meta_.run_id = derive_run_id(cfg_);
  meta_.mode = cfg_.mode == Mode::kPullRl ? "pull_rl" : "push";
  meta_.policy = cfg_.mode == Mode::kPush ? std::string(to_string(cfg_.policy)) : "-";
  meta_.seed = cfg_.workload.seed;

  requests_ = generate_arrivals(cfg_.workload);

  std::vector<std::string> all_queue_ids;
  for (const auto& q : cfg_.queues) {
    tier_.add_queue(q.id, q.capacity);
    all_queue_ids.push_back(q.id);
  }
  rules_ = std::make_unique<RuleSet>(cfg_.rules);

  std::map<std::string, int> weights;
  std::vector<std::string> server_ids;
  for (const auto& spec : cfg_.farm) {
    ServerState s;
    s.id = spec.id;
    s.base_rate = spec.base_rate;
    s.concurrency_limit = spec.concurrency;
    s.weight = spec.weight;
    s.subscription = spec.subscription.empty() ? all_queue_ids : spec.subscription;
    farm_.push_back(std::move(s));
    weights[spec.id] = spec.weight;
    server_ids.push_back(spec.id);
    acc_.assigned[spec.id] = 0;
    acc_.busy_time[spec.id] = 0.0;
    acc_.concurrency[spec.id] = spec.concurrency;
    agent_rngs_.push_back(Rng::for_stream(cfg_.workload.seed, "agent/" + spec.id));
  }

  if (cfg_.mode == Mode::kPullRl) {
    for (const auto& spec : cfg_.farm) {
      policies_.emplace_back(Observation::kNumStates, kNumActions,
                             cfg_.supervisor.epsilon.initial);
      ledger_.at(spec.id);  // materialize at zero credits
    }
    ever_settled_.assign(cfg_.farm.size(), 0);
  } else {
    balancer_ = std::make_unique<BalancerState>(server_ids, weights);
  }

  const double horizon = cfg_.workload.horizon;
  nlohmann::ordered_json farm_roster = nlohmann::ordered_json::object();
  for (const auto& spec : cfg_.farm) farm_roster[spec.id] = spec.concurrency;
  log_.append(LogRecord{0.0, 0, "meta", "", -1,
                        {{"run_id", meta_.run_id},
                         {"mode", meta_.mode},
                         {"policy", meta_.policy},
                         {"seed", meta_.seed},
                         {"horizon", horizon},
                         {"farm", std::move(farm_roster)},
                         {"queues", all_queue_ids}}});

  schedule(horizon, EventKind::kEndOfRun);
  for (const auto& f : cfg_.faults) {
    if (f.time >= horizon) continue;
    int idx = -1;
    for (std::size_t i = 0; i < farm_.size(); ++i) {
      if (farm_[i].id == f.server) idx = static_cast<int>(i);
    }
    schedule(f.time, EventKind::kFault, 0, idx, f.factor);
  }
  if (cfg_.mode == Mode::kPullRl) {
    if (cfg_.supervisor.tick_interval < horizon) {
      schedule(cfg_.supervisor.tick_interval, EventKind::kSupervisorTick);
    }
    for (std::size_t i = 0; i < farm_.size(); ++i) {
      if (cfg_.epoch_dt < horizon) {
        schedule(cfg_.epoch_dt, EventKind::kAgentEpoch, 0, static_cast<int>(i));
      }
    }
  }
  if (cfg_.metrics_interval < horizon) {
    schedule(cfg_.metrics_interval, EventKind::kMetricsSample);
  }
  for (const auto& r : requests_) {
    double effective = admit(r, cfg_.admission, r.arrival_time);
    if (effective >= horizon) continue;
    schedule(effective, EventKind::kArrival, r.id);
  }
}

void Simulation::schedule(double time, EventKind kind, std::uint64_t request,
                          int server, double factor, double service_start) {
  if (time < clock_) {
    throw InvariantViolation("causality: event scheduled in the past");
  }
  Event e;
  e.time = time;
  e.seq = next_seq_++;
  e.kind = kind;
  e.request = request;
  e.server = server;
  e.factor = factor;
  e.service_start = service_start;
  pending_.push(e);
}

void Simulation::log(double t, const std::string& kind,
                     const std::string& server, std::int64_t request,
                     nlohmann::ordered_json detail) {
  log_.append(LogRecord{t, log_seq_++, kind, server, request, std::move(detail)});
}

void Simulation::step() {
  if (done_) return;
  if (pending_.empty()) {
    throw InvariantViolation("engine: pending event set empty before end of run");
  }
  Event e = pending_.top();
  pending_.pop();
  if (e.time < clock_) {
    throw InvariantViolation("causality: event scheduled in the past");
  }
  clock_ = e.time;
  switch (e.kind) {
    case EventKind::kArrival: on_arrival(e); break;
    case EventKind::kAgentEpoch: on_agent_epoch(e); break;
    case EventKind::kServiceCompletion: on_completion(e); break;
    case EventKind::kSupervisorTick: on_supervisor_tick(e); break;
    case EventKind::kFault: on_fault(e); break;
    case EventKind::kMetricsSample: on_metrics_sample(e); break;
    case EventKind::kEndOfRun: on_end(e); break;
  }
}

void Simulation::on_arrival(const Event& e) {
  const Request& r = requests_[e.request];
  ++acc_.generated;
  // The record time is the admitted (post-offload) instant; latency metrics
  // key off the original arrival, so it rides along explicitly.
  log(clock_, "arrival", "", static_cast<std::int64_t>(r.id),
      {{"rtype", std::string(to_string(r.rtype))},
       {"priority", r.priority},
       {"secured", r.secured},
       {"arrival_time", r.arrival_time}});

  if (cfg_.mode == Mode::kPullRl) {
    const std::string& queue = rules_->classify(r);
    EnqueueResult result = tier_.enqueue(queue, r.id, clock_);
    if (result == EnqueueResult::kAccepted) {
      log(clock_, "enqueue", "", static_cast<std::int64_t>(r.id),
          {{"queue", queue}});
    } else {
      log(clock_, "drop", "", static_cast<std::int64_t>(r.id),
          {{"queue", queue}, {"reason", "overflow"}});
    }
  } else {
    const std::string& sid = balancer_->select(cfg_.policy, r, balancer_rng_);
    balancer_->note_dispatch(sid);
    ++acc_.assigned[sid];
    acc_.distribution_times.push_back(clock_ - r.arrival_time);
    log(clock_, "dispatch", sid, static_cast<std::int64_t>(r.id), {});
    for (std::size_t i = 0; i < farm_.size(); ++i) {
      if (farm_[i].id == sid) {
        farm_[i].backlog.push_back(r.id);
        start_services(static_cast<int>(i));
        break;
      }
    }
  }
}

void Simulation::on_agent_epoch(const Event& e) {
  ServerState& s = farm_[e.server];
  if (!s.alive) return;  // eviction cancels future epochs

  PolicyState& policy = policies_[e.server];
  Observation obs = agent_observe(s, tier_, cfg_.supervisor.credit_cap);
  int action = agent_decide(obs, policy, agent_rngs_[e.server]);
  int wanted = kPullBatches[action];

  // A server only fetches what it can start: pulls are capped by free
  // service capacity so work stays in the shared queues for whoever is
  // ready.
  int free_slots = s.concurrency_limit - static_cast<int>(s.in_service.size()) -
                   static_cast<int>(s.backlog.size());
  int allowed = std::min(wanted, std::max(0, free_slots));

  if (allowed >= 1) {
    auto batch = tier_.pull(s.subscription, allowed, clock_);
    if (!batch.empty()) {
      double max_wait = 0.0;
      for (const auto& p : batch) {
        max_wait = std::max(max_wait, p.wait);
        ++acc_.assigned[s.id];
        acc_.distribution_times.push_back(clock_ -
                                          requests_[p.request_id].arrival_time);
        log(clock_, "pull", s.id, static_cast<std::int64_t>(p.request_id),
            {{"queue", p.queue_id},
             {"wait", p.wait},
             {"batch", batch.size()}});
        s.backlog.push_back(p.request_id);
      }
      bool ok = qualify(max_wait, cfg_.supervisor);
      int delta = settle_credits(ledger_, s.id, ok, cfg_.supervisor);
      ever_settled_[e.server] = 1;
      s.credits = ledger_.at(s.id).credits;
      log(clock_, "settle", s.id, -1,
          {{"qualified", ok},
           {"delta", delta},
           {"credits", s.credits},
           {"batch", batch.size()},
           {"max_wait", max_wait}});
      Observation next = agent_observe(s, tier_, cfg_.supervisor.credit_cap);
      q_update(policy, obs.index(), action, delta, next.index(), cfg_.supervisor);
    }
  }
  start_services(e.server);

  double next_epoch = clock_ + cfg_.epoch_dt;
  if (next_epoch < cfg_.workload.horizon) {
    schedule(next_epoch, EventKind::kAgentEpoch, 0, e.server);
  }
}

void Simulation::start_services(int server_idx) {
  ServerState& s = farm_[server_idx];
  while (s.alive && static_cast<int>(s.in_service.size()) < s.concurrency_limit &&
         !s.backlog.empty()) {
    std::uint64_t rid = s.backlog.front();
    s.backlog.pop_front();
    double kappa = cfg_.mode == Mode::kPullRl ? cfg_.kappa : 0.0;
    double rate = effective_rate(s, kappa);
    double done_at = clock_ + requests_[rid].service_demand / rate;
    s.in_service.insert(rid);
    log(clock_, "start", s.id, static_cast<std::int64_t>(rid),
        {{"demand", requests_[rid].service_demand}, {"rate", rate}});
    schedule(done_at, EventKind::kServiceCompletion, rid, server_idx, 1.0,
             clock_);
  }
}

void Simulation::on_completion(const Event& e) {
  ServerState& s = farm_[e.server];
  // Stale completions of an evicted server are ignored.
  if (!s.alive || !s.in_service.count(e.request)) return;
  s.in_service.erase(e.request);
  ++acc_.completed;
  double rt = clock_ - requests_[e.request].arrival_time;
  double proc = clock_ - e.service_start;
  acc_.response_times.push_back(rt);
  acc_.busy_time[s.id] += proc;
  log(clock_, "completion", s.id, static_cast<std::int64_t>(e.request),
      {{"response_time", rt}, {"processing_time", proc}});
  if (cfg_.mode == Mode::kPush) {
    balancer_->note_completion(s.id, rt, kEwmaAlpha);
  }
  start_services(e.server);
}

void Simulation::on_supervisor_tick(const Event& e) {
  (void)e;
  // Only servers with at least one judged pull face the floor streak; an
  // idle farm waiting for traffic is not a failing one.
  std::vector<std::string> live;
  for (std::size_t i = 0; i < farm_.size(); ++i) {
    if (farm_[i].alive && ever_settled_[i]) live.push_back(farm_[i].id);
  }
  auto evicted = supervisor_tick(ledger_, live, cfg_.supervisor, clock_);
  for (const auto& id : evicted) {
    for (std::size_t i = 0; i < farm_.size(); ++i) {
      ServerState& s = farm_[i];
      if (s.id != id) continue;
      s.alive = false;
      for (std::uint64_t rid : s.backlog) {
        ++eviction_drops_;
        log(clock_, "drop", s.id, static_cast<std::int64_t>(rid),
            {{"reason", "evicted"}});
      }
      for (std::uint64_t rid : s.in_service) {
        ++eviction_drops_;
        log(clock_, "drop", s.id, static_cast<std::int64_t>(rid),
            {{"reason", "evicted"}});
      }
      s.backlog.clear();
      s.in_service.clear();
      log(clock_, "evict", s.id, -1, {{"credits", ledger_.at(id).credits}});
    }
  }
  double epsilon = 0.0;
  for (std::size_t i = 0; i < farm_.size(); ++i) {
    if (!farm_[i].alive) continue;
    decay_epsilon(policies_[i], cfg_.supervisor);
    epsilon = policies_[i].epsilon;
  }
  log(clock_, "tick", "", -1, {{"epsilon", epsilon}});

  double next = clock_ + cfg_.supervisor.tick_interval;
  if (next < cfg_.workload.horizon) {
    schedule(next, EventKind::kSupervisorTick);
  }
}

void Simulation::on_fault(const Event& e) {
  ServerState& s = farm_[e.server];
  if (!s.alive) return;
  s.degrade_factor = e.factor;
  log(clock_, "fault", s.id, -1, {{"factor", e.factor}});
}

std::uint64_t Simulation::in_backlog_total() const {
  std::uint64_t n = 0;
  for (const auto& s : farm_) n += s.backlog.size();
  return n;
}

std::uint64_t Simulation::in_service_total() const {
  std::uint64_t n = 0;
  for (const auto& s : farm_) n += s.in_service.size();
  return n;
}

nlohmann::ordered_json Simulation::counters_detail() const {
  nlohmann::ordered_json depths = nlohmann::ordered_json::object();
  for (const auto& qid : tier_.queue_ids()) {
    depths[qid] = tier_.depth(qid);
  }
  return {{"generated", acc_.generated},
          {"completed", acc_.completed},
          {"dropped", tier_.total_dropped() + eviction_drops_},
          {"queued", tier_.total_depth()},
          {"backlog", in_backlog_total()},
          {"in_service", in_service_total()},
          {"depths", std::move(depths)}};
}

void Simulation::check_conservation(const char* where) const {
  std::uint64_t accounted = acc_.completed + tier_.total_depth() +
                            in_backlog_total() + in_service_total() +
                            tier_.total_dropped() + eviction_drops_;
  if (accounted != acc_.generated) {
    throw InvariantViolation(std::string("conservation violated at ") + where +
                             ": generated=" + std::to_string(acc_.generated) +
                             " accounted=" + std::to_string(accounted));
  }
}

void Simulation::on_metrics_sample(const Event& e) {
  (void)e;
  check_conservation("metrics sample");
  log(clock_, "sample", "", -1, counters_detail());
  if (cfg_.mode == Mode::kPush) {
    for (const auto& s : farm_) {
      double util = static_cast<double>(s.in_service.size()) / s.concurrency_limit;
      balancer_->note_util(s.id, util, kEwmaAlpha);
    }
  }
  double next = clock_ + cfg_.metrics_interval;
  if (next < cfg_.workload.horizon) {
    schedule(next, EventKind::kMetricsSample);
  }
}

void Simulation::on_end(const Event& e) {
  (void)e;
  check_conservation("end of run");
  log(clock_, "end", "", -1, counters_detail());
  pending_ = {};
  done_ = true;
}

RunResult Simulation::finish() && {
  while (!done_) step();
  acc_.dropped = tier_.total_dropped() + eviction_drops_;
  for (const auto& qid : tier_.queue_ids()) {
    acc_.queue_max_depth[qid] = tier_.max_depth(qid);
  }
  if (cfg_.mode == Mode::kPullRl) {
    for (const auto& [id, entry] : ledger_.servers) {
      acc_.final_credits[id] = entry.credits;
    }
    acc_.evictions = ledger_.eviction_log;
  }
  MetricsReport report = finalize(acc_, cfg_.workload.horizon, meta_);
  return RunResult{std::move(report), std::move(log_)};
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  Simulation sim(cfg);
  return std::move(sim).finish();
}

}  // namespace lbsim
