#include "tnm/json_projection.hpp"

#include "tnm/error.hpp"
#include "tnm/persistence.hpp"

namespace tnm {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& message) { throw Error(Errc::parse_error, message); }

template <class T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("missing or mistyped field '") + key + "'");
  }
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return field<T>(j, key);
}

}  // namespace

json object_json(const Model& model, ObjectId id) {
  const ModelObject& obj = model.object(id);
  json ifaces = json::array();
  for (InterfaceId iid : obj.interfaces) ifaces.push_back({{"id", iid.value}, {"name", model.interface(iid).name}});
  json kids = json::array();
  for (ObjectId kid : obj.children) kids.push_back(kid.value);
  return {{"id", obj.id.value},      {"kind", to_string(obj.kind)}, {"name", obj.name}, {"parent", obj.parent.value},
          {"path", model.path_string(id)}, {"children", kids}, {"interfaces", ifaces}};
}

json to_json(const ScenarioSpec& s) {
  json resources = json::array();
  for (const auto& r : s.resources) {
    resources.push_back({{"object", r.object.value}, {"capacity", r.capacity}, {"delay", r.delay}});
  }
  json tasks = json::array();
  for (const auto& t : s.tasks) {
    tasks.push_back({{"label", t.label},
                     {"source", t.source.value},
                     {"destination", t.destination.value},
                     {"start", t.start},
                     {"repeats", t.repeats},
                     {"interval_mean", t.interval_mean},
                     {"interval_sigma", t.interval_sigma},
                     {"routed", t.routed},
                     {"request_ack", t.request_ack},
                     {"send_offset_max", t.send_offset_max}});
  }
  json services = json::array();
  for (const auto& v : s.services) {
    services.push_back(
        {{"object", v.object.value}, {"kind", to_string(v.kind)}, {"per_message_delay", v.per_message_delay}});
  }
  return {{"name", s.name},       {"duration", s.duration}, {"seed", s.seed},
          {"resources", resources}, {"tasks", tasks},       {"services", services}};
}

ScenarioSpec scenario_from_json(const json& j) {
  if (!j.is_object()) bad("scenario must be a JSON object");
  ScenarioSpec s;
  s.name = field<std::string>(j, "name");
  s.duration = field_or<double>(j, "duration", 0.0);
  s.seed = field_or<std::uint64_t>(j, "seed", 0);
  for (const auto& r : j.value("resources", json::array())) {
    s.resources.push_back({ObjectId{field<std::uint64_t>(r, "object")}, field_or<int>(r, "capacity", 1),
                           field_or<double>(r, "delay", 0.0)});
  }
  for (const auto& t : j.value("tasks", json::array())) {
    MessageTaskSpec task;
    task.label = field_or<std::string>(t, "label", "");
    task.source = ObjectId{field<std::uint64_t>(t, "source")};
    task.destination = ObjectId{field<std::uint64_t>(t, "destination")};
    task.start = field_or<double>(t, "start", 0.0);
    task.repeats = field_or<std::uint32_t>(t, "repeats", 0);
    task.interval_mean = field_or<double>(t, "interval_mean", 0.0);
    task.interval_sigma = field_or<double>(t, "interval_sigma", 0.0);
    task.routed = field_or<bool>(t, "routed", true);
    task.request_ack = field_or<bool>(t, "request_ack", false);
    task.send_offset_max = field_or<double>(t, "send_offset_max", 0.0);
    s.tasks.push_back(std::move(task));
  }
  for (const auto& v : j.value("services", json::array())) {
    auto kind = parse_service_kind(field_or<std::string>(v, "kind", "ack-responder"));
    if (!kind) bad("unknown service kind");
    s.services.push_back({ObjectId{field<std::uint64_t>(v, "object")}, field_or<double>(v, "per_message_delay", 0.0),
                          *kind});
  }
  return s;
}

json to_json(const Project& project) {
  const Model& model = project.model;
  json objects = json::array();
  for (ObjectId id : model.objects()) objects.push_back(object_json(model, id));
  json roots = json::array();
  for (ObjectId id : model.children(kRootId)) roots.push_back(id.value);
  json connections = json::array();
  for (ConnectionId cid : model.connections()) {
    const Connection& c = model.connection(cid);
    connections.push_back(
        {{"id", c.id.value}, {"a_interface", c.endpoint_a.value}, {"b_interface", c.endpoint_b.value}});
  }
  json scenarios = json::array();
  for (const auto& s : project.scenarios) scenarios.push_back(to_json(s));
  return {{"name", model.name()}, {"format_version", kFormatVersion}, {"next_id", model.state().next_id},
          {"root_children", roots}, {"objects", objects},             {"connections", connections},
          {"scenarios", scenarios}};
}

Project project_from_json(const json& j) {
  if (!j.is_object()) bad("model must be a JSON object");
  if (field_or<int>(j, "format_version", kFormatVersion) != kFormatVersion) {
    throw Error(Errc::format_version, "unsupported format_version");
  }
  ModelState state;
  state.name = field<std::string>(j, "name");
  state.next_id = field<std::uint64_t>(j, "next_id");
  for (const auto& id : j.value("root_children", json::array())) state.root_children.push_back(ObjectId{id.get<std::uint64_t>()});
  for (const auto& o : j.value("objects", json::array())) {
    ModelObject obj;
    obj.id = ObjectId{field<std::uint64_t>(o, "id")};
    auto kind = parse_object_kind(field<std::string>(o, "kind"));
    if (!kind) bad("unknown object kind");
    obj.kind = *kind;
    obj.name = field<std::string>(o, "name");
    obj.parent = ObjectId{field_or<std::uint64_t>(o, "parent", 0)};
    for (const auto& kid : o.value("children", json::array())) obj.children.push_back(ObjectId{kid.get<std::uint64_t>()});
    for (const auto& i : o.value("interfaces", json::array())) {
      InterfaceId iid{field<std::uint64_t>(i, "id")};
      obj.interfaces.push_back(iid);
      state.interfaces.emplace(iid, Interface{iid, obj.id, field<std::string>(i, "name")});
    }
    if (!state.objects.emplace(obj.id, obj).second) {
      throw Error(Errc::integrity_error, "object id " + obj.id.str() + " is used more than once");
    }
  }
  for (const auto& c : j.value("connections", json::array())) {
    ConnectionId cid{field<std::uint64_t>(c, "id")};
    state.connections.emplace(cid, Connection{cid, InterfaceId{field<std::uint64_t>(c, "a_interface")},
                                              InterfaceId{field<std::uint64_t>(c, "b_interface")}});
  }
  Model model = Model::from_state(std::move(state));
  std::vector<ScenarioSpec> scenarios;
  for (const auto& s : j.value("scenarios", json::array())) scenarios.push_back(scenario_from_json(s));
  check_references(model, scenarios);
  return Project(std::move(model), std::move(scenarios));
}

json to_json(const RunSummary& summary) {
  json labels = json::array();
  for (const auto& l : summary.labels) {
    labels.push_back({{"label", l.label},
                      {"sent", l.sent},
                      {"delivered", l.delivered},
                      {"dropped", l.dropped},
                      {"acks_sent", l.acks_sent},
                      {"acks_delivered", l.acks_delivered},
                      {"min_delivery", l.min_delivery},
                      {"mean_delivery", l.mean_delivery},
                      {"max_delivery", l.max_delivery}});
  }
  json resources = json::array();
  for (const auto& r : summary.resources) {
    resources.push_back({{"object", r.object.value},
                         {"acquisitions", r.acquisitions},
                         {"peak_concurrent", r.peak_concurrent},
                         {"busy_time", r.busy_time},
                         {"slot_seconds", r.slot_seconds}});
  }
  return {{"scenario", summary.scenario},
          {"seed", summary.seed},
          {"duration", summary.duration},
          {"total_records", summary.total_records},
          {"messages_sent", summary.messages_sent},
          {"messages_delivered", summary.messages_delivered},
          {"messages_dropped", summary.messages_dropped},
          {"labels", labels},
          {"resources", resources}};
}

}  // namespace tnm
