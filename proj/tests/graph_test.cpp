#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"
#include "tnm/fixtures.hpp"
#include "tnm/graph.hpp"

using namespace tnm;

namespace {

std::vector<std::string> names(const ConnectionGraph& g, const Path& p) {
  std::vector<std::string> out;
  for (ObjectId v : p.vertices) out.push_back(g.name(v));
  return out;
}

void expect_well_formed(const ConnectionGraph& g, const Path& p, ObjectId src, ObjectId dst) {
  ASSERT_FALSE(p.vertices.empty());
  EXPECT_EQ(p.vertices.front(), src);
  EXPECT_EQ(p.vertices.back(), dst);
  ASSERT_EQ(p.arcs.size() + 1, p.vertices.size());
  std::set<ObjectId> seen(p.vertices.begin(), p.vertices.end());
  EXPECT_EQ(seen.size(), p.vertices.size()) << "repeated vertex";
  for (std::size_t i = 0; i < p.arcs.size(); ++i) {
    EXPECT_EQ(p.arcs[i].from, p.vertices[i]);
    EXPECT_EQ(p.arcs[i].to, p.vertices[i + 1]);
    EXPECT_NE(std::find(g.arcs().begin(), g.arcs().end(), p.arcs[i]), g.arcs().end());
  }
}

struct Diamond {
  Model model{"diamond"};
  ObjectId a, b, c, d;

  Diamond() {
    a = model.add_object(kRootId, ObjectKind::Network, "A");
    c = model.add_object(kRootId, ObjectKind::Network, "C");
    b = model.add_object(kRootId, ObjectKind::Network, "B");
    d = model.add_object(kRootId, ObjectKind::Network, "D");
    // C side first so creation order alone would favour C.
    link(a, c);
    link(c, d);
    link(a, b);
    link(b, d);
  }
  void link(ObjectId x, ObjectId y) { model.connect(model.default_interface(x), model.default_interface(y)); }
};

}  // namespace

TEST(Build, CompanyModelCounts) {
  CompanyModel c = make_company_model();
  ConnectionGraph g(c.model);
  EXPECT_EQ(g.vertices().size(), 6u);
  EXPECT_EQ(g.arcs().size(), 6u);
  EXPECT_EQ(g.model_name(), "Company Model");
}

TEST(Build, EmptyModel) {
  ConnectionGraph g(Model("empty"));
  EXPECT_TRUE(g.vertices().empty());
  EXPECT_TRUE(g.arcs().empty());
}

TEST(Build, AfterCopy) {
  CompanyModel c = make_company_model();
  c.model.copy_subtree(c.afv);
  ConnectionGraph g(c.model);
  // Four new objects (AFV.1 and its three children), three new connections.
  EXPECT_EQ(g.vertices().size(), 10u);
  EXPECT_EQ(g.arcs().size(), 12u);
}

TEST(Build, ArcsArePaired) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Model m = tnm::testing::random_project(seed).model;
    ConnectionGraph g(m);
    ASSERT_EQ(g.arcs().size(), 2 * m.connection_count());
    for (std::size_t i = 0; i < g.arcs().size(); i += 2) {
      const Arc& fwd = g.arcs()[i];
      const Arc& back = g.arcs()[i + 1];
      EXPECT_NE(fwd.from, fwd.to);
      EXPECT_EQ(fwd.via, back.via);
      EXPECT_EQ(fwd.from, back.to);
      EXPECT_EQ(fwd.to, back.from);
      EXPECT_EQ(fwd.from_iface, back.to_iface);
      EXPECT_EQ(m.owner(fwd.from_iface), fwd.from);
      EXPECT_EQ(m.owner(fwd.to_iface), fwd.to);
    }
  }
}

TEST(Build, IdenticalModelsGiveIdenticalGraphs) {
  Model m1 = tnm::testing::random_project(7).model;
  Model m2 = tnm::testing::random_project(7).model;
  ConnectionGraph g1(m1), g2(m2);
  EXPECT_EQ(g1.vertices(), g2.vertices());
  EXPECT_EQ(g1.arcs(), g2.arcs());
}

TEST(AllPaths, CompanyModelHasOnePath) {
  CompanyModel c = make_company_model();
  ConnectionGraph g(c.model);
  auto paths = all_paths(g, c.terminal, c.data_network);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(names(g, paths[0]), (std::vector<std::string>{"Terminal", "Router", "Data Radio", "DataNetwork"}));
  expect_well_formed(g, paths[0], c.terminal, c.data_network);
}

TEST(AllPaths, SelfAndDisconnected) {
  Model m("m");
  ObjectId x = m.add_object(kRootId, ObjectKind::Network, "X");
  ObjectId y = m.add_object(kRootId, ObjectKind::Network, "Y");
  ConnectionGraph g(m);
  auto self = all_paths(g, x, x);
  ASSERT_EQ(self.size(), 1u);
  EXPECT_EQ(self[0].vertices, std::vector<ObjectId>{x});
  EXPECT_TRUE(self[0].arcs.empty());
  EXPECT_TRUE(all_paths(g, x, y).empty());
  EXPECT_FALSE(shortest_path(g, x, y).has_value());
}

TEST(AllPaths, DepthFirstInArcOrder) {
  Diamond f;
  ConnectionGraph g(f.model);
  auto paths = all_paths(g, f.a, f.d);
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(names(g, paths[0]), (std::vector<std::string>{"A", "C", "D"}));
  EXPECT_EQ(names(g, paths[1]), (std::vector<std::string>{"A", "B", "D"}));
}

TEST(AllPaths, UnknownVertex) {
  CompanyModel c = make_company_model();
  ConnectionGraph g(c.model);
  try {
    all_paths(g, c.terminal, ObjectId{999});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_found);
  }
  try {
    shortest_path(g, kRootId, c.terminal);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_found);
  }
}

TEST(ShortestPath, CompanyModel) {
  CompanyModel c = make_company_model();
  ConnectionGraph g(c.model);
  auto p = shortest_path(g, c.terminal, c.data_network);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->hops(), 3u);
  EXPECT_EQ(format_path(g, *p), "Terminal > Router > Data Radio > DataNetwork");
  auto self = shortest_path(g, c.router, c.router);
  ASSERT_TRUE(self);
  EXPECT_EQ(self->hops(), 0u);
}

TEST(ShortestPath, DiamondPrefersSmallerName) {
  Diamond f;
  ConnectionGraph g(f.model);
  auto both = all_paths(g, f.a, f.d);
  ASSERT_EQ(both.size(), 2u);
  EXPECT_EQ(both[0].hops(), 2u);
  EXPECT_EQ(both[1].hops(), 2u);
  auto p = shortest_path(g, f.a, f.d);
  ASSERT_TRUE(p);
  EXPECT_EQ(names(g, *p), (std::vector<std::string>{"A", "B", "D"}));
}

TEST(ShortestPath, TieBreakLooksPastFirstDifference) {
  // S-X1-Y-T and S-X2-Z-T: equal first names ("X" under two parents) so the
  // decision falls to Y < Z.
  Model m("m");
  ObjectId net = m.add_object(kRootId, ObjectKind::AreaNetwork, "S");
  ObjectId p1 = m.add_object(kRootId, ObjectKind::Composite, "P1");
  ObjectId p2 = m.add_object(kRootId, ObjectKind::Composite, "P2");
  ObjectId x2 = m.add_object(p2, ObjectKind::Network, "X");
  ObjectId z = m.add_object(p2, ObjectKind::Network, "Z");
  ObjectId x1 = m.add_object(p1, ObjectKind::Network, "X");
  ObjectId y = m.add_object(p1, ObjectKind::Network, "Y");
  ObjectId t = m.add_object(kRootId, ObjectKind::AreaNetwork, "T");
  auto link = [&](ObjectId a, ObjectId b) { m.connect(m.default_interface(a), m.default_interface(b)); };
  link(net, x2);
  link(x2, z);
  link(z, t);
  link(net, x1);
  link(x1, y);
  link(y, t);
  ConnectionGraph g(m);
  auto p = shortest_path(g, net, t);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->vertices, (std::vector<ObjectId>{net, x1, y, t}));
}

TEST(ShortestPath, ParallelArcsUseSmallestInterfacePair) {
  Model m("m");
  ObjectId a = m.add_object(kRootId, ObjectKind::Network, "A");
  ObjectId b = m.add_object(kRootId, ObjectKind::Network, "B");
  InterfaceId a_z = m.add_interface(a, "z");
  InterfaceId a_b = m.add_interface(a, "b");
  InterfaceId b_y = m.add_interface(b, "y");
  m.connect(a_z, m.default_interface(b));
  ConnectionId want = m.connect(a_b, b_y);
  m.connect(m.default_interface(b), a_b);
  ConnectionGraph g(m);
  EXPECT_EQ(g.arcs().size(), 6u);
  auto p = shortest_path(g, a, b);
  ASSERT_TRUE(p);
  ASSERT_EQ(p->hops(), 1u);
  // ("b", "default") < ("b", "y") < ("z", "default")
  EXPECT_NE(p->arcs[0].via, want);
  EXPECT_EQ(p->arcs[0].via, tnm::testing::oracle_canonical_connection(m, a, b));
  EXPECT_EQ(g.interface_name(p->arcs[0].from_iface), "b");
  EXPECT_EQ(g.interface_name(p->arcs[0].to_iface), "default");
  EXPECT_EQ(all_paths(g, a, b).size(), 1u);
}

TEST(ShortestPath, MatchesBruteForceOnRandomGraphs) {
  int pairs = 0;
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    Model m = tnm::testing::random_connected_model(seed);
    ConnectionGraph g(m);
    for (ObjectId src : g.vertices()) {
      for (ObjectId dst : g.vertices()) {
        const auto expected_set = tnm::testing::oracle_simple_paths(m, src, dst);
        const auto paths = all_paths(g, src, dst);
        std::set<std::vector<ObjectId>> got;
        for (const Path& p : paths) {
          expect_well_formed(g, p, src, dst);
          got.insert(p.vertices);
        }
        EXPECT_EQ(got.size(), paths.size()) << "duplicate path, seed " << seed;
        EXPECT_EQ(got, expected_set) << "seed " << seed;

        auto shortest = shortest_path(g, src, dst);
        auto expected = tnm::testing::oracle_shortest(m, src, dst);
        ASSERT_TRUE(shortest.has_value()) << "connected graph, seed " << seed;
        ASSERT_TRUE(expected.has_value());
        EXPECT_EQ(shortest->vertices, *expected) << "seed " << seed;
        for (const Arc& arc : shortest->arcs) {
          EXPECT_EQ(arc.via, tnm::testing::oracle_canonical_connection(m, arc.from, arc.to));
        }
        ++pairs;
      }
    }
  }
  EXPECT_GT(pairs, 1000);
}

TEST(ShortestPath, ReachableWithinComponents) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Model m = tnm::testing::random_project(seed).model;
    ConnectionGraph g(m);
    for (ObjectId src : g.vertices()) {
      for (ObjectId dst : g.vertices()) {
        const bool linked = !tnm::testing::oracle_simple_paths(m, src, dst).empty();
        EXPECT_EQ(shortest_path(g, src, dst).has_value(), linked);
        if (linked) EXPECT_TRUE(shortest_path(g, dst, src).has_value());
      }
    }
  }
}

TEST(Hierarchy, CompanyModelTree) {
  CompanyModel c = make_company_model();
  HierarchyNode root = hierarchy_tree(c.model);
  EXPECT_EQ(root.id, kRootId);
  EXPECT_FALSE(root.kind.has_value());
  ASSERT_EQ(root.children.size(), 2u);
  EXPECT_EQ(root.children[0].name, "DataNetwork");
  EXPECT_EQ(root.children[0].kind, ObjectKind::AreaNetwork);
  EXPECT_EQ(root.children[1].name, "Platoon");
  ASSERT_EQ(root.children[1].children.size(), 1u);
  const HierarchyNode& afv = root.children[1].children[0];
  EXPECT_EQ(afv.name, "AFV");
  ASSERT_EQ(afv.children.size(), 3u);
  EXPECT_EQ(afv.children[0].name, "Data Radio");
  EXPECT_EQ(afv.children[1].name, "Router");
  EXPECT_EQ(afv.children[2].name, "Terminal");

  c.model.copy_subtree(c.afv);
  HierarchyNode after = hierarchy_tree(c.model);
  ASSERT_EQ(after.children[1].children.size(), 2u);
  EXPECT_EQ(after.children[1].children[1].name, "AFV.1");

  EXPECT_TRUE(hierarchy_tree(Model("empty")).children.empty());
}

TEST(Dot, CompanyModelLines) {
  CompanyModel c = make_company_model();
  std::ostringstream out;
  write_dot(ConnectionGraph(c.model), out);
  std::istringstream in(out.str());
  std::string line;
  int vertices = 0, arcs = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "digraph \"Company Model\" {");
  while (std::getline(in, line)) {
    if (line.find(" -> ") != std::string::npos) {
      ++arcs;
    } else if (line.find("[label=") != std::string::npos) {
      ++vertices;
    }
  }
  EXPECT_EQ(vertices, 6);
  EXPECT_EQ(arcs, 6);
  EXPECT_NE(out.str().find("\"11\" [label=\"Terminal\", path=\"Platoon/AFV/Terminal\", kind=\"network\"];"),
            std::string::npos);
  EXPECT_NE(out.str().find("\"9\" -> \"7\" [connection=\"13\", tail_interface=\"default\", head_interface=\"default\"];"),
            std::string::npos);
}

TEST(Dot, EscapesNames) {
  Model m("q\"m");
  m.add_object(kRootId, ObjectKind::Network, "a\"b\\c");
  std::ostringstream out;
  write_dot(ConnectionGraph(m), out);
  EXPECT_NE(out.str().find("label=\"a\\\"b\\\\c\""), std::string::npos) << out.str();
}
