#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "tnm/scenario.hpp"

namespace tnm::testing {

// Legality recomputed from the ModelState parent pointers only.
inline bool oracle_allowed(const ModelState& s, ObjectId a, ObjectId b) {
  const ModelObject& oa = s.objects.at(a);
  const ModelObject& ob = s.objects.at(b);
  if (oa.kind == ObjectKind::AreaNetwork || ob.kind == ObjectKind::AreaNetwork) return true;
  if (oa.parent == ob.parent) return true;
  return oa.parent == b || ob.parent == a;
}

// Three-level fixture: root -> {P, N}; P -> {A, B}; A -> {a1, a2}; B -> {b1, bn}.
// N and bn are area networks.
struct ThreeLevel {
  Model model{"three-level"};
  std::map<std::string, ObjectId> ids;

  ThreeLevel() {
    auto add = [&](const char* parent, ObjectKind kind, const char* name) {
      ObjectId p = parent ? ids.at(parent) : kRootId;
      ids[name] = model.add_object(p, kind, name);
    };
    add(nullptr, ObjectKind::Composite, "P");
    add(nullptr, ObjectKind::AreaNetwork, "N");
    add("P", ObjectKind::Composite, "A");
    add("P", ObjectKind::Composite, "B");
    add("A", ObjectKind::Network, "a1");
    add("A", ObjectKind::Network, "a2");
    add("B", ObjectKind::Network, "b1");
    add("B", ObjectKind::AreaNetwork, "bn");
  }
};

// Hand-derived: the unordered pairs that must be rejected. Every other
// distinct pair is legal.
inline const std::set<std::set<std::string>>& three_level_forbidden() {
  static const std::set<std::set<std::string>> pairs = {
      {"P", "a1"}, {"P", "a2"}, {"P", "b1"}, {"A", "b1"}, {"B", "a1"}, {"B", "a2"}, {"a1", "b1"}, {"a2", "b1"},
  };
  return pairs;
}

// Name pool with collisions (to exercise auto-rename) and XML-hostile text.
inline std::string random_name(std::mt19937_64& rng) {
  static const std::vector<std::string> pool = {
      "AFV", "Router", "Terminal", "Data Radio", "Net", "HQ", "a&b", "<x>", "q\"uote", "it's", "Å-ü", "sp ace"};
  return pool[rng() % pool.size()];
}

inline double random_real(std::mt19937_64& rng, double hi) {
  return std::uniform_real_distribution<double>(0.0, hi)(rng);
}

// A rule-respecting random model built through the public operations, with
// one to three embedded scenarios referencing its objects.
inline Project random_project(std::uint64_t seed, int max_objects = 14, bool with_copy = true) {
  std::mt19937_64 rng(seed);
  Project p{Model("random " + std::to_string(seed))};
  Model& m = p.model;
  const int target = 1 + static_cast<int>(rng() % max_objects);
  while (static_cast<int>(m.object_count()) < target) {
    std::vector<ObjectId> parents{kRootId};
    for (ObjectId o : m.objects()) {
      if (m.object(o).kind == ObjectKind::Composite) parents.push_back(o);
    }
    const auto kind = static_cast<ObjectKind>(rng() % 3);
    ObjectId obj = m.add_object(parents[rng() % parents.size()], kind, random_name(rng));
    if (rng() % 4 == 0) m.add_interface(obj, "if" + std::to_string(rng() % 3));
  }
  const auto objects = m.objects();
  const int attempts = static_cast<int>(objects.size()) * 2;
  for (int i = 0; i < attempts; ++i) {
    const ModelObject& a = m.object(objects[rng() % objects.size()]);
    const ModelObject& b = m.object(objects[rng() % objects.size()]);
    if (a.id == b.id || !m.connection_allowed(a.id, b.id)) continue;
    m.connect(a.interfaces[rng() % a.interfaces.size()], b.interfaces[rng() % b.interfaces.size()]);
  }
  if (with_copy && rng() % 2 == 0) p.copy_subtree(objects[rng() % objects.size()]);

  const auto all = m.objects();
  const int scenarios = 1 + static_cast<int>(rng() % 3);
  for (int s = 0; s < scenarios; ++s) {
    ScenarioSpec spec;
    spec.name = "scenario " + std::to_string(s) + (s == 1 ? " <&>" : "");
    spec.duration = random_real(rng, 5000.0);
    spec.seed = rng();
    std::vector<ObjectId> shuffled = all;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t i = 0; i < shuffled.size() / 2; ++i) {
      spec.resources.push_back({shuffled[i], 1 + static_cast<int>(rng() % 4), random_real(rng, 5.0)});
    }
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t i = 0; i < shuffled.size() / 3; ++i) {
      spec.services.push_back({shuffled[i], random_real(rng, 1.0), ServiceKind::AckResponder});
    }
    if (all.size() >= 2) {
      const int tasks = static_cast<int>(rng() % 4);
      for (int t = 0; t < tasks; ++t) {
        MessageTaskSpec task;
        task.label = random_name(rng);
        task.source = all[rng() % all.size()];
        do {
          task.destination = all[rng() % all.size()];
        } while (task.destination == task.source);
        task.start = random_real(rng, 100.0);
        task.repeats = static_cast<std::uint32_t>(rng() % 5);
        task.interval_mean = 1.0 + random_real(rng, 60.0);
        task.interval_sigma = random_real(rng, 3.0);
        task.routed = rng() % 2 == 0;
        task.request_ack = rng() % 2 == 0;
        task.send_offset_max = rng() % 2 == 0 ? 0.0 : random_real(rng, 30.0);
        spec.tasks.push_back(task);
      }
    }
    p.scenarios.push_back(std::move(spec));
  }
  return p;
}

// A random model of at most ten objects joined into one connected
// component: components are linked by a legal pair where one exists, and any
// that remain are tied to one new root-level area network.
inline Model random_connected_model(std::uint64_t seed) {
  Model m = random_project(seed, 9, false).model;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  auto components = [&] {
    std::map<ObjectId, ObjectId> comp;
    for (ObjectId o : m.objects()) comp[o] = o;
    std::function<ObjectId(ObjectId)> root = [&](ObjectId x) { return comp[x] == x ? x : comp[x] = root(comp[x]); };
    for (ConnectionId c : m.connections()) {
      const Connection& conn = m.connection(c);
      comp[root(m.owner(conn.endpoint_a))] = root(m.owner(conn.endpoint_b));
    }
    std::map<ObjectId, std::vector<ObjectId>> groups;
    for (ObjectId o : m.objects()) groups[root(o)].push_back(o);
    std::vector<std::vector<ObjectId>> out;
    for (auto& [r, members] : groups) out.push_back(members);
    return out;
  };
  for (bool linked = true; linked;) {
    linked = false;
    const auto groups = components();
    for (std::size_t i = 0; i + 1 < groups.size() && !linked; ++i) {
      for (ObjectId a : groups[i]) {
        for (ObjectId b : groups[i + 1]) {
          if (!linked && m.connection_allowed(a, b) && rng() % 2 == 0) {
            m.connect(m.default_interface(a), m.default_interface(b));
            linked = true;
          }
        }
      }
    }
  }
  const auto groups = components();
  if (groups.size() > 1) {
    ObjectId hub = m.add_object(kRootId, ObjectKind::AreaNetwork, "Hub");
    for (const auto& g : groups) m.connect(m.default_interface(hub), m.default_interface(g.front()));
  }
  return m;
}

// Every simple vertex sequence from src to dst over the undirected
// adjacency of the model's connections.
inline std::set<std::vector<ObjectId>> oracle_simple_paths(const Model& m, ObjectId src, ObjectId dst) {
  std::map<ObjectId, std::set<ObjectId>> adj;
  for (const auto& [id, conn] : m.state().connections) {
    ObjectId a = m.state().interfaces.at(conn.endpoint_a).owner;
    ObjectId b = m.state().interfaces.at(conn.endpoint_b).owner;
    adj[a].insert(b);
    adj[b].insert(a);
  }
  std::set<std::vector<ObjectId>> out;
  std::vector<ObjectId> trail{src};
  std::function<void()> walk = [&] {
    if (trail.back() == dst) {
      out.insert(trail);
      return;
    }
    for (ObjectId next : adj[trail.back()]) {
      if (std::find(trail.begin(), trail.end(), next) != trail.end()) continue;
      trail.push_back(next);
      walk();
      trail.pop_back();
    }
  };
  walk();
  return out;
}

// The expected winner among minimum-hop sequences: smallest name sequence,
// then smallest id sequence.
inline std::optional<std::vector<ObjectId>> oracle_shortest(const Model& m, ObjectId src, ObjectId dst) {
  using Key = std::tuple<std::size_t, std::vector<std::string>, std::vector<ObjectId>>;
  std::optional<Key> best;
  for (const auto& seq : oracle_simple_paths(m, src, dst)) {
    std::vector<std::string> names;
    for (ObjectId v : seq) names.push_back(m.object(v).name);
    Key key{seq.size(), names, seq};
    if (!best || key < *best) best = key;
  }
  if (!best) return std::nullopt;
  return std::get<2>(*best);
}

// Canonical connection for the hop u -> v: smallest (u-side interface name,
// v-side interface name), then lowest connection id.
inline ConnectionId oracle_canonical_connection(const Model& m, ObjectId u, ObjectId v) {
  std::optional<std::tuple<std::string, std::string, ConnectionId>> best;
  for (const auto& [id, conn] : m.state().connections) {
    const Interface& a = m.interface(conn.endpoint_a);
    const Interface& b = m.interface(conn.endpoint_b);
    std::optional<std::tuple<std::string, std::string, ConnectionId>> key;
    if (a.owner == u && b.owner == v) key.emplace(a.name, b.name, id);
    if (b.owner == u && a.owner == v) key.emplace(b.name, a.name, id);
    if (key && (!best || *key < *best)) best = key;
  }
  return std::get<2>(*best);
}

// Completion times of n processes that all request one c-slot resource at
// t = 0 and hold it for h: the k-th finishes at h * ceil(k / c).
inline std::vector<double> serial_queue_oracle(int n, int c, double h) {
  std::vector<double> out;
  for (int k = 1; k <= n; ++k) out.push_back(h * ((k + c - 1) / c));
  return out;
}

}  // namespace tnm::testing
