#include "tnm/graph.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <tuple>
#include <unordered_set>

#include "tnm/error.hpp"

namespace tnm {

ConnectionGraph::ConnectionGraph(const Model& model) : model_name_(model.name()) {
  for (ObjectId id : model.objects()) {
    const ModelObject& obj = model.object(id);
    vertices_.push_back(id);
    index_.emplace(id, VertexInfo{obj.name, model.path_string(id), obj.kind, {}, {}});
    for (InterfaceId iid : obj.interfaces) iface_names_.emplace(iid, model.interface(iid).name);
  }
  for (ConnectionId cid : model.connections()) {
    const Connection& c = model.connection(cid);
    ObjectId a = model.owner(c.endpoint_a);
    ObjectId b = model.owner(c.endpoint_b);
    arcs_.push_back(Arc{a, b, cid, c.endpoint_a, c.endpoint_b});
    arcs_.push_back(Arc{b, a, cid, c.endpoint_b, c.endpoint_a});
  }
  for (std::size_t i = 0; i < arcs_.size(); ++i) index_.at(arcs_[i].from).out.push_back(i);

  for (ObjectId v : vertices_) {
    VertexInfo& vi = index_.at(v);
    for (std::size_t ai : vi.out) {
      const Arc& arc = arcs_[ai];
      auto it = std::find_if(vi.neighbours.begin(), vi.neighbours.end(),
                             [&](const Neighbour& n) { return n.vertex == arc.to; });
      if (it == vi.neighbours.end()) {
        vi.neighbours.push_back({arc.to, ai});
        continue;
      }
      const Arc& best = arcs_[it->arc];
      auto key = [&](const Arc& x) {
        return std::tie(iface_names_.at(x.from_iface), iface_names_.at(x.to_iface));
      };
      if (key(arc) < key(best)) it->arc = ai;
    }
  }
}

const ConnectionGraph::VertexInfo& ConnectionGraph::info(ObjectId v) const {
  auto it = index_.find(v);
  if (it == index_.end()) throw Error(Errc::not_found, "vertex " + v.str());
  return it->second;
}

const std::string& ConnectionGraph::interface_name(InterfaceId iface) const {
  auto it = iface_names_.find(iface);
  if (it == iface_names_.end()) throw Error(Errc::not_found, "interface " + iface.str());
  return it->second;
}

namespace {

struct PathSearch {
  const ConnectionGraph& graph;
  ObjectId dst;
  std::unordered_set<ObjectId> on_path;
  Path current;
  std::vector<Path> found;

  void visit(ObjectId v) {
    if (v == dst) {
      found.push_back(current);
      return;
    }
    for (const auto& n : graph.neighbours(v)) {
      if (on_path.contains(n.vertex)) continue;
      on_path.insert(n.vertex);
      current.vertices.push_back(n.vertex);
      current.arcs.push_back(graph.arcs()[n.arc]);
      visit(n.vertex);
      current.arcs.pop_back();
      current.vertices.pop_back();
      on_path.erase(n.vertex);
    }
  }
};

}  // namespace

std::vector<Path> all_paths(const ConnectionGraph& graph, ObjectId src, ObjectId dst) {
  if (!graph.has_vertex(src)) throw Error(Errc::not_found, "vertex " + src.str());
  if (!graph.has_vertex(dst)) throw Error(Errc::not_found, "vertex " + dst.str());
  PathSearch search{graph, dst, {src}, Path{{src}, {}}, {}};
  search.visit(src);
  return std::move(search.found);
}

std::optional<Path> shortest_path(const ConnectionGraph& graph, ObjectId src, ObjectId dst) {
  if (!graph.has_vertex(src)) throw Error(Errc::not_found, "vertex " + src.str());
  if (!graph.has_vertex(dst)) throw Error(Errc::not_found, "vertex " + dst.str());

  // Hop distance to dst; arcs are paired so forward BFS from dst suffices.
  constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
  std::unordered_map<ObjectId, std::size_t> dist;
  std::vector<ObjectId> frontier{dst};
  dist[dst] = 0;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    ObjectId v = frontier[head];
    for (const auto& n : graph.neighbours(v)) {
      if (dist.emplace(n.vertex, dist[v] + 1).second) frontier.push_back(n.vertex);
    }
  }
  auto distance = [&](ObjectId v) {
    auto it = dist.find(v);
    return it == dist.end() ? kUnreached : it->second;
  };
  const std::size_t total = distance(src);
  if (total == kUnreached) return std::nullopt;

  // Layer k holds the vertices at distance total-k that carry the smallest
  // name reachable from layer k-1.
  std::vector<std::vector<ObjectId>> layers{{src}};
  for (std::size_t k = 1; k <= total; ++k) {
    std::set<ObjectId> candidates;
    const std::string* best = nullptr;
    for (ObjectId u : layers.back()) {
      for (const auto& n : graph.neighbours(u)) {
        if (distance(n.vertex) != total - k) continue;
        const std::string& name = graph.name(n.vertex);
        if (best == nullptr || name < *best) {
          best = &name;
          candidates.clear();
        }
        if (name == *best) candidates.insert(n.vertex);
      }
    }
    layers.emplace_back(candidates.begin(), candidates.end());
  }

  // Keep only layer members that continue to dst through the next layer.
  for (std::size_t k = total; k-- > 0;) {
    const std::set<ObjectId> next(layers[k + 1].begin(), layers[k + 1].end());
    std::erase_if(layers[k], [&](ObjectId u) {
      const auto ns = graph.neighbours(u);
      return std::none_of(ns.begin(), ns.end(), [&](const auto& n) { return next.contains(n.vertex); });
    });
  }

  Path path{{src}, {}};
  for (std::size_t k = 1; k <= total; ++k) {
    const std::set<ObjectId> allowed(layers[k].begin(), layers[k].end());
    const ConnectionGraph::Neighbour* pick = nullptr;
    for (const auto& n : graph.neighbours(path.vertices.back())) {
      if (allowed.contains(n.vertex) && (pick == nullptr || n.vertex < pick->vertex)) pick = &n;
    }
    path.vertices.push_back(pick->vertex);
    path.arcs.push_back(graph.arcs()[pick->arc]);
  }
  return path;
}

namespace {

HierarchyNode build_node(const Model& model, ObjectId id) {
  HierarchyNode node;
  node.id = id;
  if (id == kRootId) {
    node.name = model.name();
  } else {
    node.name = model.object(id).name;
    node.kind = model.object(id).kind;
  }
  for (ObjectId kid : model.children(id)) node.children.push_back(build_node(model, kid));
  return node;
}

std::string quoted(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

HierarchyNode hierarchy_tree(const Model& model) { return build_node(model, kRootId); }

void write_dot(const ConnectionGraph& graph, std::ostream& out) {
  out << "digraph " << quoted(graph.model_name()) << " {\n";
  for (ObjectId v : graph.vertices()) {
    out << "  " << quoted(v.str()) << " [label=" << quoted(graph.name(v)) << ", path=" << quoted(graph.path_string(v))
        << ", kind=" << quoted(to_string(graph.kind(v))) << "];\n";
  }
  for (const Arc& arc : graph.arcs()) {
    out << "  " << quoted(arc.from.str()) << " -> " << quoted(arc.to.str()) << " [connection=" << quoted(arc.via.str())
        << ", tail_interface=" << quoted(graph.interface_name(arc.from_iface))
        << ", head_interface=" << quoted(graph.interface_name(arc.to_iface)) << "];\n";
  }
  out << "}\n";
}

std::string format_path(const ConnectionGraph& graph, const Path& path) {
  std::string out;
  for (ObjectId v : path.vertices) {
    if (!out.empty()) out += " > ";
    out += graph.name(v);
  }
  return out;
}

}  // namespace tnm
