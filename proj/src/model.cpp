#include "tnm/model.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace tnm {

namespace {

void check_name(std::string_view name, std::string_view what) {
  if (name.empty()) {
    throw Error(Errc::invalid_argument, std::string(what) + " name must not be empty");
  }
  if (name.find('/') != std::string_view::npos) {
    throw Error(Errc::invalid_argument, std::string(what) + " name must not contain '/': " +
                                            std::string(name));
  }
}

}  // namespace

std::string_view to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::Network: return "network";
    case ObjectKind::Composite: return "composite";
    case ObjectKind::AreaNetwork: return "area-network";
  }
  return "network";
}

std::optional<ObjectKind> parse_object_kind(std::string_view text) {
  if (text == "network") return ObjectKind::Network;
  if (text == "composite") return ObjectKind::Composite;
  if (text == "area-network") return ObjectKind::AreaNetwork;
  return std::nullopt;
}

Model::Model(std::string name) {
  if (name.empty()) throw Error(Errc::invalid_argument, "model name must not be empty");
  state_.name = std::move(name);
}

Model Model::from_state(ModelState state) {
  Model model;
  model.state_ = std::move(state);
  auto violations = model.audit();
  if (!violations.empty()) {
    std::string first = violations.front().message;
    throw Error(Errc::integrity_error, first, std::move(violations));
  }
  return model;
}

std::vector<Violation> Model::audit() const {
  std::vector<Violation> out;
  auto report = [&](Errc code, std::string message) { out.push_back({code, std::move(message)}); };
  const auto& s = state_;

  if (s.name.empty()) report(Errc::invalid_argument, "model name is empty");

  std::uint64_t max_id = 0;
  for (const auto& [id, obj] : s.objects) max_id = std::max(max_id, id.value);
  for (const auto& [id, iface] : s.interfaces) max_id = std::max(max_id, id.value);
  for (const auto& [id, conn] : s.connections) max_id = std::max(max_id, id.value);
  if (s.next_id <= max_id) {
    report(Errc::integrity_error, "next id " + std::to_string(s.next_id) + " does not exceed every allocated id");
  }
  if (s.objects.contains(kRootId)) report(Errc::integrity_error, "object id 0 is reserved for the root");

  auto check_siblings = [&](ObjectId parent, const std::vector<ObjectId>& kids) {
    std::set<std::string_view> names;
    for (ObjectId kid : kids) {
      auto it = s.objects.find(kid);
      if (it == s.objects.end()) {
        report(Errc::integrity_error, "object " + parent.str() + " lists missing child " + kid.str());
        continue;
      }
      if (it->second.parent != parent) {
        report(Errc::integrity_error, "object " + kid.str() + " is listed under " + parent.str() +
                                          " but names parent " + it->second.parent.str());
      }
      if (!names.insert(it->second.name).second) {
        report(Errc::duplicate_name, "duplicate sibling name '" + it->second.name + "' under " + parent.str());
      }
    }
  };
  check_siblings(kRootId, s.root_children);

  for (const auto& [id, obj] : s.objects) {
    if (obj.id != id) report(Errc::integrity_error, "object key " + id.str() + " holds id " + obj.id.str());
    if (obj.name.empty()) report(Errc::invalid_argument, "object " + id.str() + " has an empty name");
    if (obj.name.find('/') != std::string::npos) {
      report(Errc::invalid_argument, "object " + id.str() + " name contains '/'");
    }
    if (obj.parent != kRootId) {
      auto parent = s.objects.find(obj.parent);
      if (parent == s.objects.end()) {
        report(Errc::integrity_error, "object " + id.str() + " names missing parent " + obj.parent.str());
      } else if (parent->second.kind != ObjectKind::Composite) {
        report(Errc::illegal_parent, "object " + id.str() + " has non-composite parent " + obj.parent.str());
      }
    }
    const auto& siblings = obj.parent == kRootId ? s.root_children
                           : s.objects.contains(obj.parent) ? s.objects.at(obj.parent).children
                                                            : s.root_children;
    if (std::count(siblings.begin(), siblings.end(), id) != 1) {
      report(Errc::integrity_error, "object " + id.str() + " is not listed exactly once by its parent");
    }
    if (!obj.children.empty() && obj.kind != ObjectKind::Composite) {
      report(Errc::illegal_parent, "non-composite object " + id.str() + " has children");
    }
    check_siblings(id, obj.children);

    if (obj.interfaces.empty()) report(Errc::integrity_error, "object " + id.str() + " has no interface");
    std::set<std::string_view> iface_names;
    for (InterfaceId iid : obj.interfaces) {
      auto it = s.interfaces.find(iid);
      if (it == s.interfaces.end()) {
        report(Errc::integrity_error, "object " + id.str() + " lists missing interface " + iid.str());
        continue;
      }
      if (it->second.owner != id) {
        report(Errc::integrity_error, "interface " + iid.str() + " is listed by " + id.str() +
                                          " but owned by " + it->second.owner.str());
      }
      if (!iface_names.insert(it->second.name).second) {
        report(Errc::duplicate_name, "duplicate interface name '" + it->second.name + "' on object " + id.str());
      }
    }
  }

  // Tree reachability from the root.
  std::set<ObjectId> seen;
  std::vector<ObjectId> stack(s.root_children.rbegin(), s.root_children.rend());
  while (!stack.empty()) {
    ObjectId cur = stack.back();
    stack.pop_back();
    auto it = s.objects.find(cur);
    if (it == s.objects.end() || !seen.insert(cur).second) continue;
    stack.insert(stack.end(), it->second.children.rbegin(), it->second.children.rend());
  }
  if (seen.size() != s.objects.size()) {
    report(Errc::integrity_error, "hierarchy from the root reaches " + std::to_string(seen.size()) + " of " +
                                      std::to_string(s.objects.size()) + " objects");
  }

  for (const auto& [iid, iface] : s.interfaces) {
    if (iface.id != iid) report(Errc::integrity_error, "interface key " + iid.str() + " holds id " + iface.id.str());
    if (iface.name.empty()) report(Errc::invalid_argument, "interface " + iid.str() + " has an empty name");
    auto owner = s.objects.find(iface.owner);
    if (owner == s.objects.end()) {
      report(Errc::integrity_error, "interface " + iid.str() + " names missing owner " + iface.owner.str());
    } else if (std::find(owner->second.interfaces.begin(), owner->second.interfaces.end(), iid) ==
               owner->second.interfaces.end()) {
      report(Errc::integrity_error, "interface " + iid.str() + " is not listed by its owner");
    }
  }

  for (const auto& [cid, conn] : s.connections) {
    if (conn.id != cid) report(Errc::integrity_error, "connection key " + cid.str() + " holds id " + conn.id.str());
    auto a = s.interfaces.find(conn.endpoint_a);
    auto b = s.interfaces.find(conn.endpoint_b);
    if (a == s.interfaces.end() || b == s.interfaces.end()) {
      InterfaceId missing = a == s.interfaces.end() ? conn.endpoint_a : conn.endpoint_b;
      report(Errc::integrity_error, "connection " + cid.str() + " references missing interface " + missing.str());
      continue;
    }
    ObjectId oa = a->second.owner;
    ObjectId ob = b->second.owner;
    if (!s.objects.contains(oa) || !s.objects.contains(ob)) continue;
    if (oa == ob) {
      report(Errc::loop_forbidden, "connection " + cid.str() + " joins object " + oa.str() + " to itself");
    } else if (!connection_allowed(oa, ob)) {
      report(Errc::illegal_connection, "connection " + cid.str() + " between objects " + oa.str() + " and " +
                                           ob.str() + " violates the connection rules");
    }
  }
  return out;
}

const ModelObject& Model::object(ObjectId id) const {
  auto it = state_.objects.find(id);
  if (it == state_.objects.end()) throw Error(Errc::not_found, "object " + id.str());
  return it->second;
}

const Interface& Model::interface(InterfaceId id) const {
  auto it = state_.interfaces.find(id);
  if (it == state_.interfaces.end()) throw Error(Errc::not_found, "interface " + id.str());
  return it->second;
}

const Connection& Model::connection(ConnectionId id) const {
  auto it = state_.connections.find(id);
  if (it == state_.connections.end()) throw Error(Errc::not_found, "connection " + id.str());
  return it->second;
}

const std::vector<ObjectId>& Model::children(ObjectId parent) const {
  if (parent == kRootId) return state_.root_children;
  return object(parent).children;
}

std::vector<ObjectId>& Model::children_mut(ObjectId parent) {
  if (parent == kRootId) return state_.root_children;
  auto it = state_.objects.find(parent);
  if (it == state_.objects.end()) throw Error(Errc::not_found, "object " + parent.str());
  return it->second.children;
}

std::vector<ObjectId> Model::objects() const {
  std::vector<ObjectId> out;
  out.reserve(state_.objects.size());
  for (const auto& [id, obj] : state_.objects) out.push_back(id);
  return out;
}

std::vector<ConnectionId> Model::connections() const {
  std::vector<ConnectionId> out;
  out.reserve(state_.connections.size());
  for (const auto& [id, conn] : state_.connections) out.push_back(id);
  return out;
}

std::vector<ConnectionId> Model::connections_of(InterfaceId iface) const {
  std::vector<ConnectionId> out;
  for (const auto& [id, conn] : state_.connections) {
    if (conn.endpoint_a == iface || conn.endpoint_b == iface) out.push_back(id);
  }
  return out;
}

bool Model::has_child_named(ObjectId parent, std::string_view name) const {
  for (ObjectId kid : children(parent)) {
    if (state_.objects.at(kid).name == name) return true;
  }
  return false;
}

std::string Model::unique_child_name(ObjectId parent, std::string_view requested) const {
  if (!has_child_named(parent, requested)) return std::string(requested);
  for (std::uint64_t k = 1;; ++k) {
    std::string candidate = std::string(requested) + "." + std::to_string(k);
    if (!has_child_named(parent, candidate)) return candidate;
  }
}

ObjectId Model::create_object(ObjectId parent, ObjectKind kind, std::string name) {
  ObjectId id{allocate()};
  ModelObject obj;
  obj.id = id;
  obj.kind = kind;
  obj.name = std::move(name);
  obj.parent = parent;
  state_.objects.emplace(id, std::move(obj));
  children_mut(parent).push_back(id);
  return id;
}

InterfaceId Model::create_interface(ObjectId owner, std::string name) {
  InterfaceId id{allocate()};
  state_.interfaces.emplace(id, Interface{id, owner, std::move(name)});
  state_.objects.at(owner).interfaces.push_back(id);
  return id;
}

ConnectionId Model::create_connection(InterfaceId a, InterfaceId b) {
  ConnectionId id{allocate()};
  state_.connections.emplace(id, Connection{id, a, b});
  return id;
}

ObjectId Model::add_object(ObjectId parent, ObjectKind kind, std::string_view requested_name) {
  check_name(requested_name, "object");
  if (parent != kRootId) {
    const ModelObject& p = object(parent);
    if (p.kind != ObjectKind::Composite) {
      throw Error(Errc::illegal_parent, "object '" + p.name + "' (" + std::string(to_string(p.kind)) +
                                            ") cannot have children");
    }
  }
  ObjectId id = create_object(parent, kind, unique_child_name(parent, requested_name));
  create_interface(id, std::string(kDefaultInterfaceName));
  return id;
}

InterfaceId Model::add_interface(ObjectId owner, std::string_view name) {
  check_name(name, "interface");
  const ModelObject& obj = object(owner);
  if (find_interface(owner, name)) {
    throw Error(Errc::duplicate_name, "object '" + obj.name + "' already has interface '" + std::string(name) + "'");
  }
  return create_interface(owner, std::string(name));
}

std::optional<InterfaceId> Model::find_interface(ObjectId owner, std::string_view name) const {
  for (InterfaceId iid : object(owner).interfaces) {
    if (state_.interfaces.at(iid).name == name) return iid;
  }
  return std::nullopt;
}

bool Model::connection_allowed(ObjectId a, ObjectId b) const {
  const ModelObject& oa = object(a);
  const ModelObject& ob = object(b);
  if (oa.kind == ObjectKind::AreaNetwork || ob.kind == ObjectKind::AreaNetwork) return true;
  if (oa.parent == ob.parent) return true;
  return ob.parent == a || oa.parent == b;
}

ConnectionId Model::connect(InterfaceId a, InterfaceId b) {
  ObjectId oa = interface(a).owner;
  ObjectId ob = interface(b).owner;
  if (oa == ob) throw Error(Errc::loop_forbidden, "connection would join object " + path_string(oa) + " to itself");
  if (!connection_allowed(oa, ob)) {
    throw Error(Errc::illegal_connection, path_string(oa) + " and " + path_string(ob) +
                                              " are neither siblings, parent and child, nor an area network");
  }
  return create_connection(a, b);
}

void Model::disconnect(ConnectionId id) {
  if (state_.connections.erase(id) == 0) throw Error(Errc::not_found, "connection " + id.str());
}

void Model::rename_object(ObjectId id, std::string_view name) {
  check_name(name, "object");
  const ModelObject& obj = object(id);
  if (obj.name == name) return;
  if (has_child_named(obj.parent, name)) {
    throw Error(Errc::duplicate_name, "a sibling named '" + std::string(name) + "' already exists");
  }
  state_.objects.at(id).name = std::string(name);
}

std::vector<ObjectId> Model::subtree(ObjectId id) const {
  std::vector<ObjectId> out;
  std::vector<ObjectId> stack{id};
  while (!stack.empty()) {
    ObjectId cur = stack.back();
    stack.pop_back();
    out.push_back(cur);
    const auto& kids = object(cur).children;
    stack.insert(stack.end(), kids.rbegin(), kids.rend());
  }
  return out;
}

CopyResult Model::copy_subtree_mapped(ObjectId id) {
  if (id == kRootId) throw Error(Errc::invalid_argument, "the model root cannot be copied");
  const std::vector<ObjectId> originals = subtree(id);  // preorder
  const std::set<ObjectId> inside(originals.begin(), originals.end());

  CopyResult result;
  for (ObjectId old : originals) {
    const ModelObject src = object(old);
    ObjectId parent;
    std::string name;
    if (old == id) {
      parent = src.parent;
      name = unique_child_name(parent, src.name);
    } else {
      parent = result.objects.at(src.parent);
      name = src.name;
    }
    ObjectId fresh = create_object(parent, src.kind, std::move(name));
    result.objects.emplace(old, fresh);
    for (InterfaceId iid : src.interfaces) {
      result.interfaces.emplace(iid, create_interface(fresh, state_.interfaces.at(iid).name));
    }
  }
  result.root = result.objects.at(id);

  // Snapshot first: new connections must not be revisited.
  const auto existing = state_.connections;
  for (const auto& [cid, conn] : existing) {
    ObjectId oa = state_.interfaces.at(conn.endpoint_a).owner;
    ObjectId ob = state_.interfaces.at(conn.endpoint_b).owner;
    bool a_in = inside.contains(oa);
    bool b_in = inside.contains(ob);
    if (a_in && b_in) {
      result.connections.push_back(
          create_connection(result.interfaces.at(conn.endpoint_a), result.interfaces.at(conn.endpoint_b)));
    } else if (a_in && object(ob).kind == ObjectKind::AreaNetwork) {
      result.connections.push_back(create_connection(result.interfaces.at(conn.endpoint_a), conn.endpoint_b));
    } else if (b_in && object(oa).kind == ObjectKind::AreaNetwork) {
      result.connections.push_back(create_connection(conn.endpoint_a, result.interfaces.at(conn.endpoint_b)));
    }
  }
  return result;
}

void Model::remove_object(ObjectId id) {
  if (id == kRootId) throw Error(Errc::invalid_argument, "the model root cannot be removed");
  const ObjectId parent = object(id).parent;
  const std::vector<ObjectId> doomed = subtree(id);
  std::set<InterfaceId> ifaces;
  for (ObjectId o : doomed) {
    for (InterfaceId iid : state_.objects.at(o).interfaces) ifaces.insert(iid);
  }
  std::erase_if(state_.connections, [&](const auto& entry) {
    return ifaces.contains(entry.second.endpoint_a) || ifaces.contains(entry.second.endpoint_b);
  });
  for (InterfaceId iid : ifaces) state_.interfaces.erase(iid);
  for (ObjectId o : doomed) state_.objects.erase(o);
  std::erase(children_mut(parent), id);
}

std::optional<ObjectId> Model::find_object(std::span<const std::string> path) const {
  ObjectId cur = kRootId;
  for (const std::string& name : path) {
    if (cur != kRootId && state_.objects.at(cur).kind != ObjectKind::Composite) return std::nullopt;
    std::optional<ObjectId> next;
    for (ObjectId kid : children(cur)) {
      if (state_.objects.at(kid).name == name) {
        next = kid;
        break;
      }
    }
    if (!next) return std::nullopt;
    cur = *next;
  }
  return cur;
}

std::optional<ObjectId> Model::find_object(std::string_view slash_path) const {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= slash_path.size()) {
    std::size_t end = slash_path.find('/', start);
    if (end == std::string_view::npos) end = slash_path.size();
    if (end > start) parts.emplace_back(slash_path.substr(start, end - start));
    start = end + 1;
  }
  return find_object(parts);
}

std::vector<std::string> Model::name_path(ObjectId id) const {
  std::vector<std::string> out;
  for (ObjectId cur = id; cur != kRootId; cur = object(cur).parent) out.push_back(object(cur).name);
  std::reverse(out.begin(), out.end());
  return out;
}

std::string Model::path_string(ObjectId id) const {
  std::string out;
  for (const auto& part : name_path(id)) {
    if (!out.empty()) out += '/';
    out += part;
  }
  return out;
}

}  // namespace tnm
