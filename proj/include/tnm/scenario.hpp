#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tnm/graph.hpp"
#include "tnm/ids.hpp"
#include "tnm/model.hpp"

namespace tnm {

// Contended resource on an object: `capacity` concurrent holders, each held
// for `delay` seconds.
struct ResourceSpec {
  ObjectId object;
  int capacity = 1;
  double delay = 0.0;

  bool operator==(const ResourceSpec&) const = default;
};

// A message sent once at `start` and then `repeats` more times. Each repeat
// follows the previous nominal send by max(0.001, Normal(mean, sigma)).
// Every occurrence is additionally delayed by Uniform[0, send_offset_max].
struct MessageTaskSpec {
  std::string label;
  ObjectId source;
  ObjectId destination;
  double start = 0.0;
  std::uint32_t repeats = 0;
  double interval_mean = 0.0;
  double interval_sigma = 0.0;
  bool routed = true;
  bool request_ack = false;
  double send_offset_max = 0.0;

  bool operator==(const MessageTaskSpec&) const = default;
};

enum class ServiceKind { AckResponder };

std::string_view to_string(ServiceKind kind);
std::optional<ServiceKind> parse_service_kind(std::string_view text);

struct ServiceSpec {
  ObjectId object;
  double per_message_delay = 0.0;
  ServiceKind kind = ServiceKind::AckResponder;

  bool operator==(const ServiceSpec&) const = default;
};

struct ScenarioSpec {
  std::string name;
  std::vector<ResourceSpec> resources;
  std::vector<MessageTaskSpec> tasks;
  std::vector<ServiceSpec> services;
  double duration = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const ScenarioSpec&) const = default;
};

// Smallest interval between repeats; Gaussian samples are truncated here.
inline constexpr double kMinRepeatInterval = 0.001;

enum class LogKind { Sent, HopAcquired, HopReleased, Delivered, AckSent, AckDelivered, Dropped };

std::string_view to_string(LogKind kind);
std::optional<LogKind> parse_log_kind(std::string_view text);

struct LogRecord {
  double time = 0.0;
  LogKind kind = LogKind::Sent;
  std::uint64_t message_id = 0;
  std::string task_label;
  ObjectId object;
  std::optional<std::uint32_t> hop_index;
  std::string detail;

  bool operator==(const LogRecord&) const = default;
};

struct SimLog {
  std::string scenario;
  std::uint64_t seed = 0;
  double duration = 0.0;
  // Objects carrying a resource in this run, in object order.
  std::vector<ObjectId> resource_objects;
  std::vector<LogRecord> records;
};

// A model plus the scenarios attached to its objects. Copying or removing
// objects carries the attached specs along.
struct Project {
  Model model;
  std::vector<ScenarioSpec> scenarios;

  explicit Project(Model m) : model(std::move(m)) {}
  Project(Model m, std::vector<ScenarioSpec> s) : model(std::move(m)), scenarios(std::move(s)) {}

  const ScenarioSpec* find_scenario(std::string_view name) const;
  ScenarioSpec* find_scenario(std::string_view name);

  // Copies the subtree and duplicates every resource and service on a copied
  // object, and every task whose source was copied. A task destination inside
  // the subtree maps to its copy; otherwise it is kept.
  CopyResult copy_subtree(ObjectId object);

  // Removes the subtree and drops specs that referenced any removed object.
  void remove_object(ObjectId object);

  bool operator==(const Project&) const = default;
};

// Validated, executable scenario over an immutable graph snapshot.
class BoundScenario {
 public:
  BoundScenario(const Model& model, ScenarioSpec spec);

  const ScenarioSpec& spec() const noexcept { return spec_; }
  const ConnectionGraph& graph() const noexcept { return graph_; }
  const ResourceSpec* resource_on(ObjectId object) const;
  const ServiceSpec* service_on(ObjectId object) const;

 private:
  ScenarioSpec spec_;
  ConnectionGraph graph_;
};

// Throws not-found for dangling object ids, conflict for a second resource
// or service on one object, invalid-argument for malformed specs.
BoundScenario bind(const Model& model, const ScenarioSpec& spec);

SimLog run(const BoundScenario& scenario);

struct DeliverySample {
  double send_time = 0.0;
  double delivery_seconds = 0.0;

  bool operator==(const DeliverySample&) const = default;
};

// One sample per delivered (non-ack) message of `label`, by send time.
std::vector<DeliverySample> delivery_times(const SimLog& log, std::string_view label);

struct LabelStats {
  std::string label;
  std::size_t sent = 0;
  std::size_t delivered = 0;
  std::size_t dropped = 0;
  std::size_t acks_sent = 0;
  std::size_t acks_delivered = 0;
  double min_delivery = 0.0;
  double mean_delivery = 0.0;
  double max_delivery = 0.0;
};

struct ResourceUsage {
  ObjectId object;
  std::size_t acquisitions = 0;
  int peak_concurrent = 0;
  // Time with at least one holder.
  double busy_time = 0.0;
  // Integral of the holder count over time.
  double slot_seconds = 0.0;
};

struct RunSummary {
  std::string scenario;
  std::uint64_t seed = 0;
  double duration = 0.0;
  std::size_t total_records = 0;
  // Forward messages plus acknowledgements.
  std::size_t messages_sent = 0;
  std::size_t messages_delivered = 0;
  std::size_t messages_dropped = 0;
  std::vector<LabelStats> labels;  // sorted by label
  std::vector<ResourceUsage> resources;
};

RunSummary summarize(const SimLog& log);

}  // namespace tnm
