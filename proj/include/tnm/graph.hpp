#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tnm/ids.hpp"
#include "tnm/model.hpp"

namespace tnm {

struct Arc {
  ObjectId from;
  ObjectId to;
  ConnectionId via;
  InterfaceId from_iface;
  InterfaceId to_iface;

  bool operator==(const Arc&) const = default;
};

struct Path {
  std::vector<ObjectId> vertices;
  std::vector<Arc> arcs;

  std::size_t hops() const noexcept { return arcs.size(); }
  bool operator==(const Path&) const = default;
};

// Immutable directed multigraph snapshot of a model's connections. Every
// non-root object is a vertex; every connection contributes the arc a->b
// followed by b->a. Vertex and arc order follow creation order.
class ConnectionGraph {
 public:
  explicit ConnectionGraph(const Model& model);

  const std::string& model_name() const noexcept { return model_name_; }
  const std::vector<ObjectId>& vertices() const noexcept { return vertices_; }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }

  bool has_vertex(ObjectId v) const { return index_.contains(v); }
  const std::string& name(ObjectId v) const { return info(v).name; }
  const std::string& path_string(ObjectId v) const { return info(v).path; }
  ObjectKind kind(ObjectId v) const { return info(v).kind; }
  const std::string& interface_name(InterfaceId iface) const;

  // Indices into arcs() leaving v, in arc order.
  std::span<const std::size_t> out_arcs(ObjectId v) const { return info(v).out; }

  // Distinct neighbours of v in first-arc order. Each carries the canonical
  // arc: smallest (from interface name, to interface name), then arc order.
  struct Neighbour {
    ObjectId vertex;
    std::size_t arc;
  };
  std::span<const Neighbour> neighbours(ObjectId v) const { return info(v).neighbours; }

 private:
  struct VertexInfo {
    std::string name;
    std::string path;
    ObjectKind kind;
    std::vector<std::size_t> out;
    std::vector<Neighbour> neighbours;
  };
  const VertexInfo& info(ObjectId v) const;

  std::string model_name_;
  std::vector<ObjectId> vertices_;
  std::vector<Arc> arcs_;
  std::unordered_map<ObjectId, VertexInfo> index_;
  std::unordered_map<InterfaceId, std::string> iface_names_;
};

inline ConnectionGraph build_connection_graph(const Model& model) { return ConnectionGraph(model); }

// Every simple path from src to dst, depth first, neighbours in arc order.
// Parallel arcs collapse to the canonical arc, so each vertex sequence
// appears once. src == dst yields the single zero-arc path.
std::vector<Path> all_paths(const ConnectionGraph& graph, ObjectId src, ObjectId dst);

// Minimum-hop path. Ties go to the smallest sequence of vertex names, then
// the smallest sequence of vertex ids.
std::optional<Path> shortest_path(const ConnectionGraph& graph, ObjectId src, ObjectId dst);

struct HierarchyNode {
  ObjectId id;
  std::string name;
  std::optional<ObjectKind> kind;  // empty for the root
  std::vector<HierarchyNode> children;
};

HierarchyNode hierarchy_tree(const Model& model);

// Graphviz DOT: one vertex statement per line, then one arc statement per
// line. Grammar in docs/graph-format.md.
void write_dot(const ConnectionGraph& graph, std::ostream& out);

// "Terminal > Router > Data Radio > DataNetwork"
std::string format_path(const ConnectionGraph& graph, const Path& path);

}  // namespace tnm
