#include "tnm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <unordered_map>

#include "tnm/des.hpp"
#include "tnm/error.hpp"

namespace tnm {

std::string_view to_string(ServiceKind kind) {
  switch (kind) {
    case ServiceKind::AckResponder: return "ack-responder";
  }
  return "ack-responder";
}

std::optional<ServiceKind> parse_service_kind(std::string_view text) {
  if (text == "ack-responder") return ServiceKind::AckResponder;
  return std::nullopt;
}

std::string_view to_string(LogKind kind) {
  switch (kind) {
    case LogKind::Sent: return "Sent";
    case LogKind::HopAcquired: return "HopAcquired";
    case LogKind::HopReleased: return "HopReleased";
    case LogKind::Delivered: return "Delivered";
    case LogKind::AckSent: return "AckSent";
    case LogKind::AckDelivered: return "AckDelivered";
    case LogKind::Dropped: return "Dropped";
  }
  return "Sent";
}

std::optional<LogKind> parse_log_kind(std::string_view text) {
  for (LogKind k : {LogKind::Sent, LogKind::HopAcquired, LogKind::HopReleased, LogKind::Delivered, LogKind::AckSent,
                    LogKind::AckDelivered, LogKind::Dropped}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

const ScenarioSpec* Project::find_scenario(std::string_view name) const {
  for (const auto& s : scenarios) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

ScenarioSpec* Project::find_scenario(std::string_view name) {
  for (auto& s : scenarios) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

CopyResult Project::copy_subtree(ObjectId object) {
  CopyResult copy = model.copy_subtree_mapped(object);
  auto mapped = [&](ObjectId id) -> std::optional<ObjectId> {
    auto it = copy.objects.find(id);
    if (it == copy.objects.end()) return std::nullopt;
    return it->second;
  };
  for (auto& scenario : scenarios) {
    const auto resources = scenario.resources;
    for (const auto& r : resources) {
      if (auto to = mapped(r.object)) scenario.resources.push_back({*to, r.capacity, r.delay});
    }
    const auto services = scenario.services;
    for (const auto& s : services) {
      if (auto to = mapped(s.object)) scenario.services.push_back({*to, s.per_message_delay, s.kind});
    }
    const auto tasks = scenario.tasks;
    for (const auto& t : tasks) {
      auto src = mapped(t.source);
      if (!src) continue;
      MessageTaskSpec dup = t;
      dup.source = *src;
      dup.destination = mapped(t.destination).value_or(t.destination);
      scenario.tasks.push_back(std::move(dup));
    }
  }
  return copy;
}

void Project::remove_object(ObjectId object) {
  model.remove_object(object);
  auto gone = [&](ObjectId id) { return !model.contains(id); };
  for (auto& scenario : scenarios) {
    std::erase_if(scenario.resources, [&](const ResourceSpec& r) { return gone(r.object); });
    std::erase_if(scenario.services, [&](const ServiceSpec& s) { return gone(s.object); });
    std::erase_if(scenario.tasks,
                  [&](const MessageTaskSpec& t) { return gone(t.source) || gone(t.destination); });
  }
}

namespace {

void require_object(const Model& model, ObjectId id, const std::string& what) {
  if (!model.contains(id)) throw Error(Errc::not_found, what + " references unknown object " + id.str());
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(Errc::invalid_argument, message);
}

bool non_negative(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

BoundScenario::BoundScenario(const Model& model, ScenarioSpec spec) : spec_(std::move(spec)), graph_(model) {
  require(!spec_.name.empty(), "scenario name must not be empty");
  require(non_negative(spec_.duration), "scenario duration must be a non-negative number");

  std::set<ObjectId> with_resource;
  for (const auto& r : spec_.resources) {
    require_object(model, r.object, "resource");
    require(r.capacity >= 1, "resource capacity must be at least 1");
    require(non_negative(r.delay), "resource delay must be non-negative");
    if (!with_resource.insert(r.object).second) {
      throw Error(Errc::conflict, "object " + model.path_string(r.object) + " already has a resource");
    }
  }
  std::set<ObjectId> with_service;
  for (const auto& s : spec_.services) {
    require_object(model, s.object, "service");
    require(non_negative(s.per_message_delay), "service delay must be non-negative");
    if (!with_service.insert(s.object).second) {
      throw Error(Errc::conflict, "object " + model.path_string(s.object) + " already has a service");
    }
  }
  for (const auto& t : spec_.tasks) {
    const std::string what = "task '" + t.label + "'";
    require_object(model, t.source, what);
    require_object(model, t.destination, what);
    require(t.source != t.destination, what + " sends to its own source");
    require(non_negative(t.start), what + " start must be non-negative");
    require(non_negative(t.interval_sigma), what + " interval sigma must be non-negative");
    require(non_negative(t.send_offset_max), what + " send offset must be non-negative");
    require(t.repeats == 0 || (std::isfinite(t.interval_mean) && t.interval_mean > 0.0),
            what + " repeats need a positive interval mean");
  }
}

const ResourceSpec* BoundScenario::resource_on(ObjectId object) const {
  for (const auto& r : spec_.resources) {
    if (r.object == object) return &r;
  }
  return nullptr;
}

const ServiceSpec* BoundScenario::service_on(ObjectId object) const {
  for (const auto& s : spec_.services) {
    if (s.object == object) return &s;
  }
  return nullptr;
}

BoundScenario bind(const Model& model, const ScenarioSpec& spec) { return BoundScenario(model, spec); }

namespace {

using des::Process;

// Task times are kept on a microsecond grid.
double quantise(double seconds) { return std::round(seconds * 1e6) / 1e6; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t { Interval = 1, Offset = 2 };

// Independent generator per (seed, task, occurrence, purpose).
std::mt19937_64 stream(std::uint64_t seed, std::size_t task, std::uint64_t occurrence, Stream purpose) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(task));
  h = splitmix64(h ^ occurrence);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return std::mt19937_64(h);
}

double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

// Box-Muller; spelled out so samples match across standard libraries.
double standard_normal(std::mt19937_64& gen) {
  const double u1 = 1.0 - unit_uniform(gen);
  const double u2 = unit_uniform(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct AckRequest {
  std::uint64_t original;
  ObjectId responder;
  ObjectId reply_to;
  std::string label;
};

struct Service {
  Service(des::Simulation& sim, ServiceSpec s) : spec(s), inbox(sim) {}
  ServiceSpec spec;
  des::Mailbox<AckRequest> inbox;
};

struct Delivery {
  std::uint64_t id = 0;
  std::string label;
  ObjectId source;
  ObjectId destination;
  bool routed = true;
  bool is_ack = false;
  bool request_ack = false;
  std::string detail;
};

struct RunContext {
  explicit RunContext(const BoundScenario& b) : bound(b) {
    for (const auto& r : b.spec().resources) {
      resources.emplace(r.object, HopResource{&sim.add_resource(r.capacity), r.delay});
    }
    for (const auto& s : b.spec().services) services.emplace(s.object, std::make_unique<Service>(sim, s));
  }

  struct HopResource {
    des::Resource* resource;
    double delay;
  };

  void log(LogKind kind, const Delivery& d, ObjectId object, std::optional<std::uint32_t> hop,
           std::string detail = {}) {
    records.push_back(LogRecord{sim.now(), kind, d.id, d.label, object, hop, std::move(detail)});
  }

  const std::optional<Path>& route(ObjectId from, ObjectId to) {
    auto key = std::make_pair(from, to);
    auto it = routes.find(key);
    if (it == routes.end()) it = routes.emplace(key, shortest_path(bound.graph(), from, to)).first;
    return it->second;
  }

  const BoundScenario& bound;
  std::unordered_map<ObjectId, HopResource> resources;
  std::map<std::pair<ObjectId, ObjectId>, std::optional<Path>> routes;
  std::vector<LogRecord> records;
  std::uint64_t next_message = 1;
  // Declared last so suspended processes are torn down before the state
  // they reference.
  std::unordered_map<ObjectId, std::unique_ptr<Service>> services;
  des::Simulation sim;
};

Process deliver(RunContext& ctx, Delivery d) {
  d.id = ctx.next_message++;
  ctx.log(d.is_ack ? LogKind::AckSent : LogKind::Sent, d, d.source, std::nullopt, d.detail);

  if (d.routed) {
    const std::optional<Path>& path = ctx.route(d.source, d.destination);
    if (!path) {
      ctx.log(LogKind::Dropped, d, d.source, std::nullopt, "unreachable");
      co_return;
    }
    for (std::size_t hop = 0; hop < path->vertices.size(); ++hop) {
      const ObjectId at = path->vertices[hop];
      auto it = ctx.resources.find(at);
      if (it == ctx.resources.end()) continue;
      des::Slot slot = co_await it->second.resource->acquire();
      ctx.log(LogKind::HopAcquired, d, at, static_cast<std::uint32_t>(hop));
      co_await ctx.sim.timeout(it->second.delay);
      ctx.log(LogKind::HopReleased, d, at, static_cast<std::uint32_t>(hop));
      slot.release();
    }
  } else if (auto it = ctx.resources.find(d.destination); it != ctx.resources.end()) {
    des::Slot slot = co_await it->second.resource->acquire();
    ctx.log(LogKind::HopAcquired, d, d.destination, std::nullopt);
    co_await ctx.sim.timeout(it->second.delay);
    ctx.log(LogKind::HopReleased, d, d.destination, std::nullopt);
    slot.release();
  }

  ctx.log(d.is_ack ? LogKind::AckDelivered : LogKind::Delivered, d, d.destination, std::nullopt);
  if (!d.is_ack && d.request_ack) {
    auto svc = ctx.services.find(d.destination);
    if (svc != ctx.services.end()) svc->second->inbox.put(AckRequest{d.id, d.destination, d.source, d.label});
  }
}

// Serves one request at a time; a zero delay answers every queued request
// at the same instant.
Process serve(RunContext& ctx, Service& service) {
  for (;;) {
    AckRequest req = co_await service.inbox.get();
    if (service.spec.per_message_delay > 0.0) co_await ctx.sim.timeout(service.spec.per_message_delay);
    Delivery ack;
    ack.label = req.label;
    ack.source = req.responder;
    ack.destination = req.reply_to;
    ack.routed = true;
    ack.is_ack = true;
    ack.detail = "ack-of=" + std::to_string(req.original) + " to=" + req.reply_to.str();
    ctx.sim.spawn(deliver(ctx, std::move(ack)));
  }
}

Process drive_task(RunContext& ctx, std::size_t index) {
  const MessageTaskSpec& task = ctx.bound.spec().tasks[index];
  const std::uint64_t seed = ctx.bound.spec().seed;
  double nominal = quantise(task.start);
  for (std::uint64_t occurrence = 0; occurrence <= task.repeats; ++occurrence) {
    co_await ctx.sim.wait_until(nominal);

    Delivery d;
    d.label = task.label;
    d.source = task.source;
    d.destination = task.destination;
    d.routed = task.routed;
    d.request_ack = task.request_ack;
    d.detail = "task=" + std::to_string(index) + " occurrence=" + std::to_string(occurrence) +
               " to=" + task.destination.str();
    double offset = 0.0;
    if (task.send_offset_max > 0.0) {
      auto gen = stream(seed, index, occurrence, Stream::Offset);
      offset = quantise(unit_uniform(gen) * task.send_offset_max);
    }
    ctx.sim.schedule(nominal + offset, deliver(ctx, std::move(d)));

    if (occurrence == task.repeats) break;
    double interval = task.interval_mean;
    if (task.interval_sigma > 0.0) {
      auto gen = stream(seed, index, occurrence, Stream::Interval);
      interval += task.interval_sigma * standard_normal(gen);
    }
    nominal += std::max(kMinRepeatInterval, quantise(interval));
  }
}

}  // namespace

SimLog run(const BoundScenario& scenario) {
  RunContext ctx(scenario);
  for (auto& [object, service] : ctx.services) ctx.sim.spawn(serve(ctx, *service));
  for (std::size_t i = 0; i < scenario.spec().tasks.size(); ++i) ctx.sim.spawn(drive_task(ctx, i));
  ctx.sim.run_until(scenario.spec().duration);

  SimLog log;
  log.scenario = scenario.spec().name;
  log.seed = scenario.spec().seed;
  log.duration = scenario.spec().duration;
  for (const auto& r : scenario.spec().resources) log.resource_objects.push_back(r.object);
  std::sort(log.resource_objects.begin(), log.resource_objects.end());
  log.records = std::move(ctx.records);
  return log;
}

std::vector<DeliverySample> delivery_times(const SimLog& log, std::string_view label) {
  std::unordered_map<std::uint64_t, double> sent;
  std::vector<std::pair<std::uint64_t, DeliverySample>> out;
  for (const auto& r : log.records) {
    if (r.task_label != label) continue;
    if (r.kind == LogKind::Sent) {
      sent.emplace(r.message_id, r.time);
    } else if (r.kind == LogKind::Delivered) {
      auto it = sent.find(r.message_id);
      if (it != sent.end()) out.push_back({r.message_id, {it->second, r.time - it->second}});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second.send_time != b.second.send_time) return a.second.send_time < b.second.send_time;
    return a.first < b.first;
  });
  std::vector<DeliverySample> samples;
  samples.reserve(out.size());
  for (auto& [id, sample] : out) samples.push_back(sample);
  return samples;
}

RunSummary summarize(const SimLog& log) {
  RunSummary summary;
  summary.scenario = log.scenario;
  summary.seed = log.seed;
  summary.duration = log.duration;
  summary.total_records = log.records.size();

  struct LabelAccumulator {
    LabelStats stats;
    double total = 0.0;
  };
  std::map<std::string, LabelAccumulator> labels;
  std::unordered_map<std::uint64_t, double> sent_at;

  struct Usage {
    ResourceUsage usage;
    int holders = 0;
    double since = 0.0;
  };
  std::map<ObjectId, Usage> usage;
  for (ObjectId id : log.resource_objects) usage[id].usage.object = id;

  auto advance = [](Usage& u, double now) {
    if (u.holders > 0) {
      u.usage.busy_time += now - u.since;
      u.usage.slot_seconds += (now - u.since) * u.holders;
    }
    u.since = now;
  };

  for (const auto& r : log.records) {
    auto& acc = labels[r.task_label];
    acc.stats.label = r.task_label;
    switch (r.kind) {
      case LogKind::Sent:
        ++acc.stats.sent;
        ++summary.messages_sent;
        sent_at[r.message_id] = r.time;
        break;
      case LogKind::AckSent:
        ++acc.stats.acks_sent;
        ++summary.messages_sent;
        break;
      case LogKind::Delivered: {
        ++summary.messages_delivered;
        auto it = sent_at.find(r.message_id);
        if (it == sent_at.end()) break;
        const double dt = r.time - it->second;
        auto& s = acc.stats;
        s.min_delivery = s.delivered == 0 ? dt : std::min(s.min_delivery, dt);
        s.max_delivery = s.delivered == 0 ? dt : std::max(s.max_delivery, dt);
        ++s.delivered;
        acc.total += dt;
        break;
      }
      case LogKind::AckDelivered:
        ++acc.stats.acks_delivered;
        ++summary.messages_delivered;
        break;
      case LogKind::Dropped:
        ++acc.stats.dropped;
        ++summary.messages_dropped;
        break;
      case LogKind::HopAcquired: {
        auto& u = usage[r.object];
        u.usage.object = r.object;
        advance(u, r.time);
        ++u.holders;
        ++u.usage.acquisitions;
        u.usage.peak_concurrent = std::max(u.usage.peak_concurrent, u.holders);
        break;
      }
      case LogKind::HopReleased: {
        auto& u = usage[r.object];
        advance(u, r.time);
        u.holders = std::max(0, u.holders - 1);
        break;
      }
    }
  }
  for (auto& [id, u] : usage) {
    advance(u, std::max(u.since, log.duration));
    summary.resources.push_back(u.usage);
  }
  for (auto& [label, acc] : labels) {
    if (acc.stats.delivered > 0) acc.stats.mean_delivery = acc.total / static_cast<double>(acc.stats.delivered);
    summary.labels.push_back(acc.stats);
  }
  return summary;
}

}  // namespace tnm
