#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tnm/error.hpp"
#include "tnm/ids.hpp"

namespace tnm {

enum class ObjectKind { Network, Composite, AreaNetwork };

// "network", "composite", "area-network"
std::string_view to_string(ObjectKind kind);
std::optional<ObjectKind> parse_object_kind(std::string_view text);

inline constexpr std::string_view kDefaultInterfaceName = "default";

struct Interface {
  InterfaceId id;
  ObjectId owner;
  std::string name;

  bool operator==(const Interface&) const = default;
};

struct ModelObject {
  ObjectId id;
  ObjectKind kind = ObjectKind::Network;
  std::string name;
  ObjectId parent = kRootId;
  std::vector<ObjectId> children;
  std::vector<InterfaceId> interfaces;

  bool operator==(const ModelObject&) const = default;
};

struct Connection {
  ConnectionId id;
  InterfaceId endpoint_a;
  InterfaceId endpoint_b;

  bool operator==(const Connection&) const = default;
};

// Plain persisted state of a model. Ids are allocated from one counter.
struct ModelState {
  std::string name;
  std::uint64_t next_id = 1;
  std::vector<ObjectId> root_children;
  std::map<ObjectId, ModelObject> objects;
  std::map<InterfaceId, Interface> interfaces;
  std::map<ConnectionId, Connection> connections;

  bool operator==(const ModelState&) const = default;
};

// Old-to-new mapping produced by a subtree copy.
struct CopyResult {
  ObjectId root;
  std::map<ObjectId, ObjectId> objects;
  std::map<InterfaceId, InterfaceId> interfaces;
  std::vector<ConnectionId> connections;
};

// Hierarchical model: a tree of objects rooted at an implicit anchor, plus
// bidirectional connections between object interfaces. Single writer.
class Model {
 public:
  explicit Model(std::string name);

  // Validates every invariant and throws integrity-error listing all
  // violations if any fail.
  static Model from_state(ModelState state);
  const ModelState& state() const noexcept { return state_; }

  // Every violated invariant; empty for a valid model.
  std::vector<Violation> audit() const;

  const std::string& name() const noexcept { return state_.name; }

  ObjectId add_object(ObjectId parent, ObjectKind kind, std::string_view requested_name);
  InterfaceId add_interface(ObjectId object, std::string_view name);
  ConnectionId connect(InterfaceId a, InterfaceId b);
  void disconnect(ConnectionId connection);
  void rename_object(ObjectId object, std::string_view name);

  ObjectId copy_subtree(ObjectId object) { return copy_subtree_mapped(object).root; }
  CopyResult copy_subtree_mapped(ObjectId object);

  void remove_object(ObjectId object);

  // Resolves a root-to-object name path; the empty path is the root.
  std::optional<ObjectId> find_object(std::span<const std::string> path) const;
  std::optional<ObjectId> find_object(std::string_view slash_path) const;
  std::optional<InterfaceId> find_interface(ObjectId object, std::string_view name) const;

  bool contains(ObjectId object) const { return state_.objects.contains(object); }
  const ModelObject& object(ObjectId object) const;
  const Interface& interface(InterfaceId iface) const;
  const Connection& connection(ConnectionId connection) const;

  InterfaceId default_interface(ObjectId object) const { return this->object(object).interfaces.front(); }
  ObjectId owner(InterfaceId iface) const { return interface(iface).owner; }

  // Children of a composite or of the root, in insertion order.
  const std::vector<ObjectId>& children(ObjectId parent) const;

  // All non-root objects / connections in creation order.
  std::vector<ObjectId> objects() const;
  std::vector<ConnectionId> connections() const;
  std::vector<ConnectionId> connections_of(InterfaceId iface) const;

  std::size_t object_count() const noexcept { return state_.objects.size(); }
  std::size_t connection_count() const noexcept { return state_.connections.size(); }

  std::vector<std::string> name_path(ObjectId object) const;
  // Names joined with '/', e.g. "Platoon/AFV/Router".
  std::string path_string(ObjectId object) const;

  // Connection legality between two distinct owners: siblings, immediate
  // parent and child, or at least one area network.
  bool connection_allowed(ObjectId a, ObjectId b) const;

  bool operator==(const Model&) const = default;

 private:
  Model() = default;

  std::uint64_t allocate() { return state_.next_id++; }
  std::vector<ObjectId>& children_mut(ObjectId parent);
  ObjectId create_object(ObjectId parent, ObjectKind kind, std::string name);
  InterfaceId create_interface(ObjectId owner, std::string name);
  ConnectionId create_connection(InterfaceId a, InterfaceId b);
  std::string unique_child_name(ObjectId parent, std::string_view requested) const;
  bool has_child_named(ObjectId parent, std::string_view name) const;
  std::vector<ObjectId> subtree(ObjectId object) const;

  ModelState state_;
};

}  // namespace tnm
