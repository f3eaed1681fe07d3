/* Copyright 2026 The edgepart Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "edgepart/sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "edgepart/errors.hpp"

namespace edgepart {

namespace {

constexpr std::uint64_t kMaxEvents = 50'000'000;
constexpr std::uint64_t kWorkloadArrival = 0;
constexpr std::uint64_t kInjectedArrival = 1;

int rank(SimEventKind kind) {
  switch (kind) {
    case SimEventKind::kTaskComplete:
      return 0;
    case SimEventKind::kTaskArrival:
      return 1;
    case SimEventKind::kNodeJoin:
    case SimEventKind::kNodeLeave:
      return 2;  // membership shares a rank; insertion order decides
    case SimEventKind::kDispatchRetry:
      return 3;
    case SimEventKind::kMonitorSample:
      break;
  }
  return 4;
}

double transfer_ms(const NodeSpec& dest, std::uint64_t bytes,
                   double bandwidth_mbps, Rng& rng) {
  double ms = dest.latency_ms;
  if (dest.latency_jitter_ms > 0.0) ms += rng.uniform(0.0, dest.latency_jitter_ms);
  // Mbit/s -> bits per ms
  return ms + static_cast<double>(bytes) * 8.0 / (bandwidth_mbps * 1000.0);
}

}  // namespace

double exec_time_ms(double cost, const NodeProfile& node, const ExecModel& model,
                    double jitter_draw, bool memory_pressure) {
  if (!(node.cpu > 0.0)) {
    throw DomainError("node '" + node.name + "' has no cpu to execute on");
  }
  const double pressure = memory_pressure ? model.memory_pressure_factor : 1.0;
  const double jitter = model.jitter_pct / 100.0 * std::clamp(jitter_draw, -1.0, 1.0);
  return cost * model.base_ms_per_cost_unit / node.cpu * pressure * (1.0 + jitter);
}

double exec_time_ms(double cost, const NodeProfile& node, const ExecModel& model,
                    Rng& rng, bool memory_pressure) {
  return exec_time_ms(cost, node, model, rng.uniform(-1.0, 1.0), memory_pressure);
}

std::string_view to_string(SimEventKind kind) {
  switch (kind) {
    case SimEventKind::kTaskComplete:
      return "task_complete";
    case SimEventKind::kTaskArrival:
      return "task_arrival";
    case SimEventKind::kNodeJoin:
      return "node_join";
    case SimEventKind::kNodeLeave:
      return "node_leave";
    case SimEventKind::kDispatchRetry:
      return "dispatch_retry";
    case SimEventKind::kMonitorSample:
      break;
  }
  return "monitor_sample";
}

bool Simulator::EventOrder::operator()(const SimEvent& a,
                                       const SimEvent& b) const {
  // priority_queue pops the greatest element; invert for earliest-first.
  if (a.time_ms != b.time_ms) return a.time_ms > b.time_ms;
  if (rank(a.kind) != rank(b.kind)) return rank(a.kind) > rank(b.kind);
  return a.seq > b.seq;
}

Simulator::Simulator(Scenario scenario)
    : scenario_(std::move(scenario)),
      scheduler_(scenario_.scheduler),
      exec_rng_(Rng::derive(scenario_.seed, 1)),
      net_rng_(Rng::derive(scenario_.seed, 2)) {
  scenario_.validate();
  profile_ = cost_profile(scenario_.model);
  for (const auto& spec : scenario_.nodes) on_join(spec);
  refresh_plan();

  for (const auto& m : scenario_.membership) {
    if (m.action == MembershipEvent::Action::kJoin) {
      node_join(m.node, m.time_ms);
    } else {
      node_leave(m.node.id, m.time_ms);
    }
  }

  const auto& wl = scenario_.workload;
  if (wl.process == ArrivalProcess::kFixedRate) {
    schedule_next_arrival(0.0);
  } else {
    const auto clients = std::min<std::uint64_t>(wl.concurrency, wl.requests);
    for (std::uint64_t i = 0; i < clients; ++i) schedule_next_arrival(0.0);
  }

  const double end = scenario_.end_ms();
  for (std::uint64_t k = 1;; ++k) {
    const double t = static_cast<double>(k) * scenario_.monitor_interval_ms;
    if (t > end) break;
    push({t, SimEventKind::kMonitorSample});
  }
}

void Simulator::push(SimEvent ev) {
  ev.seq = next_seq_++;
  events_.push(ev);
}

void Simulator::node_join(NodeSpec node, double time_ms) {
  if (time_ms < now_) throw DomainError("cannot schedule a join in the past");
  joins_.push_back(std::move(node));
  push({time_ms, SimEventKind::kNodeJoin, 0, joins_.size() - 1});
}

void Simulator::node_leave(const std::string& node_id, double time_ms) {
  if (time_ms < now_) throw DomainError("cannot schedule a leave in the past");
  leaves_.push_back(node_id);
  push({time_ms, SimEventKind::kNodeLeave, 0, leaves_.size() - 1});
}

void Simulator::submit_request(double time_ms) {
  if (time_ms < now_) throw DomainError("cannot submit a request in the past");
  push({time_ms, SimEventKind::kTaskArrival, 0, kInjectedArrival});
}

void Simulator::schedule_next_arrival(double after_ms) {
  const auto& wl = scenario_.workload;
  if (generated_ >= wl.requests) return;
  double t = after_ms;
  if (wl.process == ArrivalProcess::kFixedRate) {
    t = static_cast<double>(generated_) * 1000.0 / wl.rate_rps;
  }
  if (t >= scenario_.end_ms()) return;
  ++generated_;
  push({t, SimEventKind::kTaskArrival, 0, kWorkloadArrival});
}

void Simulator::run() {
  std::uint64_t processed = 0;
  while (!events_.empty()) {
    const SimEvent ev = events_.top();
    if (!scenario_.drain && ev.time_ms > scenario_.end_ms()) break;
    events_.pop();
    if (++processed > kMaxEvents) {
      throw InternalError("simulation exceeded the event budget");
    }
    now_ = ev.time_ms;
    process(ev);
  }
  if (now_ < scenario_.end_ms()) now_ = scenario_.end_ms();
  note_starvation();
}

void Simulator::run_until(double t_ms) {
  while (!events_.empty() && events_.top().time_ms <= t_ms) {
    const SimEvent ev = events_.top();
    events_.pop();
    now_ = ev.time_ms;
    process(ev);
  }
  if (t_ms > now_) now_ = t_ms;
  note_starvation();
}

void Simulator::process(const SimEvent& ev) {
  trace_.push_back({ev.time_ms, ev.kind, ev.subject});
  switch (ev.kind) {
    case SimEventKind::kTaskComplete:
      on_complete(ev.subject, ev.attempt);
      break;
    case SimEventKind::kTaskArrival:
      if (ev.delivery) {
        on_delivery(ev.subject, ev.attempt);
      } else {
        const bool workload = ev.subject == kWorkloadArrival;
        if (workload &&
            scenario_.workload.process == ArrivalProcess::kFixedRate) {
          schedule_next_arrival(ev.time_ms);
        }
        on_request_arrival(ev.time_ms, workload);
      }
      break;
    case SimEventKind::kNodeJoin:
      on_join(joins_.at(ev.subject));
      break;
    case SimEventKind::kNodeLeave:
      on_leave(leaves_.at(ev.subject));
      break;
    case SimEventKind::kDispatchRetry:
      retry_pending_ = false;
      dispatch();
      break;
    case SimEventKind::kMonitorSample:
      on_monitor();
      break;
  }
  note_starvation();
  check_conservation();
}

void Simulator::on_request_arrival(double t, bool from_workload) {
  Request r;
  r.from_workload = from_workload;
  r.id = next_request_++;
  r.submit_ms = t;
  r.stages = stages_;
  ++submitted_;
  auto& stored = requests_.emplace(r.id, std::move(r)).first->second;
  enqueue_stage(stored);
  dispatch();
}

void Simulator::enqueue_stage(Request& request) {
  const auto& wl = scenario_.workload;
  Task task;
  task.id = next_task_++;
  task.request = request.id;
  task.stage = request.stage;
  task.spec.task_id =
      "r" + std::to_string(request.id) + ".s" + std::to_string(request.stage);
  task.spec.cpu_req = wl.cpu_req;
  task.spec.mem_req_mib = wl.mem_req_mib;
  task.spec.priority = wl.priority;
  task.ready_ms = now_;
  tasks_.emplace(task.id, std::move(task));
  pending_.push_back(next_task_ - 1);
}

SimNode* Simulator::find_node(const std::string& id) {
  for (auto& n : nodes_) {
    if (n.online && n.spec.id == id) return &n;
  }
  return nullptr;
}

const SimNode* Simulator::find_node(const std::string& id) const {
  for (const auto& n : nodes_) {
    if (n.online && n.spec.id == id) return &n;
  }
  return nullptr;
}

std::size_t Simulator::online_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const SimNode& n) { return n.online; }));
}

double Simulator::busy_within(const SimNode& node, double from_ms,
                              double to_ms) const {
  double busy = 0.0;
  for (const auto& [s, e] : node.busy) {
    busy += std::max(0.0, std::min(e, to_ms) - std::max(s, from_ms));
  }
  if (node.running) {
    busy += std::max(0.0, to_ms - std::max(node.run_start_ms, from_ms));
  }
  return busy;
}

double Simulator::node_load(const std::string& node_id) const {
  const SimNode* node = find_node(node_id);
  if (!node) throw NotFoundError("unknown node '" + node_id + "'");
  const double w = scenario_.load_window_ms;
  return std::clamp(busy_within(*node, now_ - w, now_) / w, 0.0, 1.0);
}

void Simulator::refresh_scheduler_view() {
  for (const auto& n : nodes_) {
    if (!n.online) continue;
    scheduler_.update_node(n.spec.id,
                           std::max(0.0, n.spec.profile.cpu - n.cpu_reserved),
                           std::max(0.0, n.spec.profile.memory_mib - n.mem_reserved_mib),
                           node_load(n.spec.id), n.spec.latency_ms);
  }
}

bool Simulator::statically_feasible(const TaskRequest& task) const {
  const auto& cfg = scenario_.scheduler;
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const SimNode& n) {
    return n.online && n.spec.latency_ms <= cfg.latency_threshold_ms &&
           n.spec.profile.cpu >= task.cpu_req &&
           n.spec.profile.memory_mib >= task.mem_req_mib;
  });
}

void Simulator::dispatch() {
  while (!pending_.empty()) {
    Task& head = tasks_.at(pending_.front());
    refresh_scheduler_view();
    const auto chosen = scheduler_.select(head.spec);
    if (!chosen) break;
    pending_.pop_front();
    assign(head, *find_node(*chosen));
  }
  if (!pending_.empty() && !retry_pending_ &&
      statically_feasible(tasks_.at(pending_.front()).spec)) {
    retry_pending_ = true;
    push({now_ + scenario_.dispatch_retry_ms, SimEventKind::kDispatchRetry});
  }
}

void Simulator::assign(Task& task, SimNode& node) {
  auto& request = requests_.at(task.request);
  const auto& wl = scenario_.workload;
  request.queue_wait_ms += now_ - task.ready_ms;
  if (!request.timed_out && request.queue_wait_ms > scenario_.queue_timeout_ms) {
    request.timed_out = true;
    ++queue_timeouts_;
  }

  scheduler_.assign(node.spec.id);
  node.assigned.push_back(task.id);
  node.cpu_reserved += task.spec.cpu_req;
  node.mem_reserved_mib += task.spec.mem_req_mib;
  task.node = node.spec.id;

  double delay = 0.0;
  if (task.stage == 0) {
    const std::uint64_t bytes = wl.input_bytes * wl.batch_size;
    delay = transfer_ms(node.spec, bytes, scenario_.bandwidth_mbps, net_rng_);
    node.rx_bytes += bytes;
    request.bytes += bytes;
  } else if (request.last_node != node.spec.id) {
    const std::uint64_t bytes = wl.activation_bytes * wl.batch_size;
    delay = transfer_ms(node.spec, bytes, scenario_.bandwidth_mbps, net_rng_);
    node.rx_bytes += bytes;
    if (request.last_node) {
      if (SimNode* src = find_node(*request.last_node)) src->tx_bytes += bytes;
    }
    request.bytes += bytes;
    request.transfer_ms += delay;
  }
  SimEvent ev{now_ + delay, SimEventKind::kTaskArrival, 0, task.id, task.attempt};
  ev.delivery = true;
  push(ev);
}

void Simulator::on_delivery(std::uint64_t task_id, std::uint32_t attempt) {
  auto it = tasks_.find(task_id);
  if (it == tasks_.end() || it->second.attempt != attempt || !it->second.node) {
    return;  // superseded by a reschedule
  }
  SimNode* node = find_node(*it->second.node);
  if (!node) throw InternalError("delivery to a node that is not online");
  node->ready.push_back(task_id);
  start_next(*node);
}

void Simulator::start_next(SimNode& node) {
  if (node.running || node.ready.empty()) return;
  const std::uint64_t id = node.ready.front();
  node.ready.pop_front();
  Task& task = tasks_.at(id);
  const auto& request = requests_.at(task.request);
  const Stage& stage = request.stages->at(task.stage);

  node.running = id;
  node.run_start_ms = now_;
  task.start_ms = now_;
  const double others = node.mem_reserved_mib - task.spec.mem_req_mib;
  const bool pressure =
      stage.working_set_mib > node.spec.profile.memory_mib - others;
  const double cost = static_cast<double>(stage.cost) *
                      static_cast<double>(scenario_.workload.batch_size);
  const double ms =
      exec_time_ms(cost, node.spec.profile, scenario_.exec, exec_rng_, pressure);
  push({now_ + ms, SimEventKind::kTaskComplete, 0, id, task.attempt});
}

void Simulator::on_complete(std::uint64_t task_id, std::uint32_t attempt) {
  auto it = tasks_.find(task_id);
  if (it == tasks_.end() || it->second.attempt != attempt || !it->second.node) {
    return;
  }
  Task task = it->second;
  SimNode* node = find_node(*task.node);
  if (!node || node->running != task_id) {
    throw InternalError("completion for a task that is not running");
  }
  node->busy.emplace_back(node->run_start_ms, now_);
  const double horizon =
      now_ - std::max(scenario_.load_window_ms, scenario_.monitor_window_ms);
  while (!node->busy.empty() && node->busy.front().second < horizon) {
    node->busy.pop_front();
  }
  node->running.reset();
  node->cpu_reserved = std::max(0.0, node->cpu_reserved - task.spec.cpu_req);
  node->mem_reserved_mib =
      std::max(0.0, node->mem_reserved_mib - task.spec.mem_req_mib);
  node->assigned.erase(
      std::find(node->assigned.begin(), node->assigned.end(), task_id));

  TaskRecord record;
  record.task_id = task.spec.task_id;
  record.node_id = node->spec.id;
  record.submit_ms = task.ready_ms;
  record.start_ms = task.start_ms;
  record.end_ms = now_;
  task_records_.push_back(
      scheduler_.complete(record, task.spec, node_load(node->spec.id)));
  tasks_.erase(it);

  auto& request = requests_.at(task.request);
  request.exec_ms += task_records_.back().exec_ms;
  request.last_node = node->spec.id;
  ++request.stage;
  if (request.stage == request.stages->size()) {
    RequestRecord done;
    done.request_id = "r" + std::to_string(request.id);
    done.submit_ms = request.submit_ms;
    done.end_ms = now_;
    done.exec_ms = request.exec_ms;
    done.transfer_ms = request.transfer_ms;
    done.bytes_moved = request.bytes;
    done.rescheduled = request.rescheduled;
    done.queue_timeout = request.timed_out;
    finished_.push_back(std::move(done));
    ++completed_;
    const bool chain = request.from_workload;
    requests_.erase(task.request);
    if (chain && scenario_.workload.process == ArrivalProcess::kClosedLoop) {
      schedule_next_arrival(now_ + scenario_.workload.think_ms);
    }
  } else {
    enqueue_stage(request);
  }
  start_next(*node);
  dispatch();
}

void Simulator::on_join(const NodeSpec& spec) {
  if (find_node(spec.id)) {
    throw DomainError("node '" + spec.id + "' is already a member");
  }
  SimNode node;
  node.spec = spec;
  node.joined_ms = now_;
  nodes_.push_back(std::move(node));

  NodeState state;
  state.node_id = spec.id;
  state.cpu_avail = spec.profile.cpu;
  state.mem_avail_mib = spec.profile.memory_mib;
  state.network_latency_ms = spec.latency_ms;
  scheduler_.add_node(std::move(state));
  refresh_plan();
  dispatch();
}

void Simulator::on_leave(const std::string& node_id) {
  SimNode* node = find_node(node_id);
  if (!node) throw NotFoundError("node '" + node_id + "' is not a member");
  node->online = false;
  node->left_ms = now_;
  scheduler_.remove_node(node_id);

  std::vector<std::uint64_t> orphans(node->assigned.begin(),
                                     node->assigned.end());
  node->assigned.clear();
  node->ready.clear();
  node->running.reset();
  node->cpu_reserved = 0.0;
  node->mem_reserved_mib = 0.0;
  for (auto id : orphans) {
    Task& task = tasks_.at(id);
    ++task.attempt;
    task.node.reset();
    task.ready_ms = now_;
    requests_.at(task.request).rescheduled = true;
    ++rescheduled_;
  }
  pending_.insert(pending_.begin(), orphans.begin(), orphans.end());
  refresh_plan();
  dispatch();
}

void Simulator::on_monitor() {
  const double w = scenario_.monitor_window_ms;
  for (const auto& n : nodes_) {
    if (!n.online) continue;
    ResourceSample s;
    s.time_ms = now_;
    s.node_id = n.spec.id;
    s.cpu_pct = std::clamp(busy_within(n, now_ - w, now_) / w * 100.0, 0.0, 100.0);
    s.mem_used_mib = n.mem_reserved_mib;
    s.mem_pct = n.spec.profile.memory_mib > 0.0
                    ? std::clamp(n.mem_reserved_mib / n.spec.profile.memory_mib *
                                     100.0,
                                 0.0, 100.0)
                    : 0.0;
    s.net_rx_bytes = n.rx_bytes;
    s.net_tx_bytes = n.tx_bytes;
    samples_.push_back(std::move(s));
  }
}

void Simulator::refresh_plan() {
  std::vector<NodeCapability> caps;
  for (const auto& n : nodes_) {
    if (n.online) {
      caps.push_back({n.spec.id, n.spec.profile.cpu, n.spec.profile.memory_mib});
    }
  }
  norm_ = edgepart::capability_norm(caps);

  const std::size_t layers = profile_.size();
  if (scenario_.mode == ExecutionMode::kMonolithic) {
    if (!plan_.ranges.empty()) return;
    plan_ = greedy_partition(profile_, 1);
  } else if (scenario_.strategy == PartitionStrategy::kGreedy) {
    if (!plan_.ranges.empty()) return;
    plan_ = partition_model(profile_, scenario_.partitions);
  } else {
    // Keep the plan in force when the membership cannot support a new one.
    if (caps.empty() || caps.size() > layers) {
      if (!plan_.ranges.empty()) return;
      plan_ = greedy_partition(profile_, 1);
    } else {
      plan_ = capability_partition(profile_, caps, scenario_.capability_weights);
    }
  }

  auto stages = std::make_shared<std::vector<Stage>>();
  for (std::size_t i = 0; i < plan_.size(); ++i) {
    std::uint64_t params = 0;
    for (std::size_t l = plan_.ranges[i].first; l <= plan_.ranges[i].last; ++l) {
      params += scenario_.model.layers[l].param_count;
    }
    stages->push_back({plan_.costs[i], static_cast<double>(params) *
                                           scenario_.exec.bytes_per_param /
                                           (1024.0 * 1024.0)});
  }
  stages_ = std::move(stages);
}

ClusterCounts Simulator::counts() const {
  ClusterCounts c;
  c.submitted = submitted_;
  c.completed = completed_;
  c.queued = pending_.size();
  for (const auto& n : nodes_) {
    if (n.online) c.in_flight += n.assigned.size();
  }
  return c;
}

void Simulator::check_conservation() const {
  const auto c = counts();
  if (c.submitted != c.completed + c.queued + c.in_flight) {
    throw InternalError("task conservation violated: submitted " +
                        std::to_string(c.submitted) + " != completed " +
                        std::to_string(c.completed) + " + queued " +
                        std::to_string(c.queued) + " + in flight " +
                        std::to_string(c.in_flight));
  }
}

void Simulator::note_starvation() {
  const bool starving = online_count() == 0 && !pending_.empty();
  if (starving && !starving_since_) {
    starving_since_ = now_;
  } else if (!starving && starving_since_) {
    starvation_ms_ += now_ - *starving_since_;
    starving_since_.reset();
  }
}

double Simulator::starvation_ms() const {
  return starvation_ms_ + (starving_since_ ? now_ - *starving_since_ : 0.0);
}

MetricsReport Simulator::report() const {
  const MeasurementWindow window{scenario_.warmup_ms, scenario_.end_ms()};
  MetricsReport r = aggregate(finished_, samples_, window);
  const auto counters = scheduler_.counters();
  if (scenario_.measure_wall_time && counters.decisions > 0) {
    r.scheduling_overhead_ms = static_cast<double>(counters.select_wall_ns) /
                               1e6 / static_cast<double>(counters.decisions);
  }
  r.load_balance_L = plan_.balance;
  r.starvation_ms = starvation_ms();
  r.scheduler = {counters.decisions, counters.score_evaluations,
                 counters.cache_hits};

  const auto c = counts();
  r.tasks.submitted = c.submitted;
  r.tasks.completed = c.completed;
  r.tasks.rescheduled = rescheduled_;
  r.tasks.queue_timeouts = queue_timeouts_;
  r.tasks.queued_at_end = c.queued;
  r.tasks.in_flight_at_end = c.in_flight;

  std::set<std::string> seen;
  for (const auto& n : nodes_) {
    if (!seen.insert(n.spec.id).second) continue;
    NodeReport nr;
    nr.node_id = n.spec.id;
    const SimNode* live = find_node(n.spec.id);
    nr.online = live != nullptr;
    double exec = 0.0;
    for (const auto& t : task_records_) {
      if (t.node_id != n.spec.id || !window.contains(t.end_ms)) continue;
      ++nr.completed;
      exec += t.exec_ms;
    }
    if (nr.completed > 0) {
      nr.mean_exec_ms = exec / static_cast<double>(nr.completed);
    }
    if (live) {
      nr.in_flight = live->assigned.size();
      nr.current_load = node_load(n.spec.id);
    }
    double cpu = 0.0;
    std::size_t samples = 0;
    for (const auto& s : samples_) {
      if (s.node_id != n.spec.id || !window.contains(s.time_ms)) continue;
      cpu += s.cpu_pct;
      ++samples;
    }
    if (samples > 0) nr.cpu_pct = cpu / static_cast<double>(samples);
    r.per_node.push_back(std::move(nr));
  }
  return r;
}

MetricsReport run_scenario(const Scenario& scenario) {
  Simulator sim(scenario);
  sim.run();
  return sim.report();
}

}  // namespace edgepart
