#include <gtest/gtest.h>

#include <chrono>
#include <httplib.h>
#include <json.hpp>
#include <thread>

#include "tnm/fixtures.hpp"
#include "tnm/json_projection.hpp"
#include "tnm/persistence.hpp"
#include "tnm/service.hpp"

using namespace tnm;
using nlohmann::json;

namespace {

ScenarioSpec company_scenario(const CompanyModel& c) {
  ScenarioSpec s;
  s.name = "company";
  s.duration = 600;
  s.seed = 7;
  s.resources = {{c.router, 1, 0.5}, {c.data_radio, 1, 2.0}, {c.data_network, 1, 2.0}};
  s.tasks.push_back({"ping", c.terminal, c.data_network, 0.0, 9, 60.0, 5.0, true, true, 0.0});
  s.services.push_back({c.data_network, 0.25, ServiceKind::AckResponder});
  return s;
}

class Service : public ::testing::Test {
 protected:
  void start(ApiService::Options options = {}) {
    project.emplace(company.model, std::vector<ScenarioSpec>{company_scenario(company)});
    service = std::make_unique<ApiService>(*project, options);
    const int port = service->bind_any("127.0.0.1");
    ASSERT_GT(port, 0);
    thread = std::thread([this] { service->listen(); });
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(30, 0);
  }

  void SetUp() override { start(); }

  void TearDown() override {
    service->stop();
    thread.join();
  }

  json body(const httplib::Result& r) {
    EXPECT_TRUE(r) << httplib::to_string(r.error());
    return r ? json::parse(r->body) : json();
  }

  httplib::Result post(const std::string& path, const json& j, const httplib::Headers& h = {}) {
    return client->Post(path, h, j.dump(), "application/json");
  }

  std::string wait_done(const std::string& id) {
    for (int i = 0; i < 2000; ++i) {
      auto r = client->Get("/runs/" + id);
      const std::string status = body(r).value("status", "");
      if (status != "pending" && status != "running") return status;
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    return "timeout";
  }

  CompanyModel company = make_company_model();
  std::optional<Project> project;
  std::unique_ptr<ApiService> service;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;
};

}  // namespace

TEST_F(Service, GetModelXmlAndJson) {
  auto r = client->Get("/model");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("ETag"), "\"1\"");
  EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(r->body, save(*project));

  r = client->Get("/model", {{"Accept", "application/json"}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  const json doc = json::parse(r->body);
  EXPECT_EQ(doc["objects"].size(), 6u);
  EXPECT_EQ(doc["connections"].size(), 3u);
}

TEST_F(Service, AddObjectAutoRenames) {
  auto r = post("/objects", {{"parent", company.platoon.value}, {"kind", "composite"}, {"name", "AFV"}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201);
  EXPECT_EQ(body(r)["name"], "AFV.1");
  EXPECT_EQ(r->get_header_value("ETag"), "\"2\"");
  EXPECT_EQ(service->version(), 2u);
  EXPECT_TRUE(service->snapshot().model.find_object("Platoon/AFV.1"));
}

TEST_F(Service, AddObjectErrors) {
  auto r = post("/objects", {{"parent", company.router.value}, {"kind", "network"}, {"name", "x"}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(body(r)["error"], "illegal-parent");
  r = post("/objects", {{"parent", 4242}, {"kind", "network"}, {"name", "x"}});
  EXPECT_EQ(r->status, 404);
  r = post("/objects", {{"kind", "gizmo"}, {"name", "x"}});
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(body(r)["error"], "invalid-argument");
  r = post("/objects", {{"parent", "three"}, {"kind", "network"}, {"name", "x"}});
  EXPECT_EQ(r->status, 400);
  r = client->Post("/objects", "{not json", "application/json");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(body(r)["error"], "parse-error");
  EXPECT_EQ(service->version(), 1u);
}

TEST_F(Service, CousinConnectionIsRejected) {
  auto copy = client->Post("/objects/" + company.platoon.str() + "/copy");
  ASSERT_TRUE(copy);
  ASSERT_EQ(copy->status, 201);
  const json result = body(copy);
  EXPECT_EQ(result["root"]["name"], "Platoon.1");
  EXPECT_EQ(result["objects"].size(), 5u);
  // Two internal connections plus the radio link to the area network.
  EXPECT_EQ(result["connections"].size(), 3u);

  const Project snap = service->snapshot();
  const ObjectId cousin = *snap.model.find_object("Platoon.1/AFV/Router");
  const std::string before = save(snap);
  auto r = post("/connections", {{"a_interface", snap.model.default_interface(company.router).value},
                                 {"b_interface", snap.model.default_interface(cousin).value}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(body(r)["error"], "illegal-connection");
  EXPECT_EQ(save(service->snapshot()), before);

  // A second radio link to the area network is legal.
  const ObjectId radio = *snap.model.find_object("Platoon.1/AFV/Data Radio");
  r = post("/connections", {{"a_interface", snap.model.default_interface(radio).value},
                            {"b_interface", snap.model.default_interface(company.data_network).value}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201);
}

TEST_F(Service, InterfacesAndDeletes) {
  auto r = post("/objects/" + company.router.str() + "/interfaces", {{"name", "lan"}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201);
  EXPECT_EQ(body(r)["owner"], company.router.value);

  auto d = client->Delete("/connections/13");
  ASSERT_TRUE(d);
  EXPECT_EQ(d->status, 204);
  EXPECT_EQ(client->Delete("/connections/13")->status, 404);

  d = client->Delete("/objects/" + company.afv.str());
  EXPECT_EQ(d->status, 204);
  const Project snap = service->snapshot();
  EXPECT_EQ(snap.model.object_count(), 2u);
  EXPECT_EQ(snap.model.connection_count(), 0u);
  // The scenario lost its task and resources but stays listed.
  auto list = client->Get("/scenarios");
  const json scenarios = body(list);
  ASSERT_EQ(scenarios.size(), 1u);
  EXPECT_TRUE(scenarios[0]["tasks"].empty());

  EXPECT_EQ(client->Delete("/objects/" + company.afv.str())->status, 404);
  EXPECT_EQ(client->Delete("/objects/0")->status, 422);
}

TEST_F(Service, IfMatchGuardsEdits) {
  auto stale = httplib::Headers{{"If-Match", "\"1\""}};
  auto r = post("/objects", {{"kind", "network"}, {"name", "A"}}, stale);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201);
  r = post("/objects", {{"kind", "network"}, {"name", "B"}}, stale);
  EXPECT_EQ(r->status, 409);
  EXPECT_EQ(body(r)["error"], "conflict");
  r = post("/objects", {{"kind", "network"}, {"name", "B"}}, {{"If-Match", "\"2\""}});
  EXPECT_EQ(r->status, 201);
  EXPECT_EQ(r->get_header_value("ETag"), "\"3\"");
}

TEST_F(Service, PutModel) {
  BattleGroupOptions o;
  const Project bg = make_battle_group(o);
  auto r = client->Put("/model", save(bg), "application/xml");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(body(r)["objects"], 143);
  EXPECT_EQ(service->snapshot(), bg);

  r = client->Put("/model", "<tnm-model", "application/xml");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(body(r)["error"], "parse-error");

  std::string broken = save(Project(company.model));
  broken.replace(broken.find("b-interface=\"2\""), 15, "b-interface=\"77\"");
  r = client->Put("/model", broken, "application/xml");
  EXPECT_EQ(r->status, 422);
  const json err = body(r);
  EXPECT_EQ(err["error"], "integrity-error");
  EXPECT_FALSE(err["violations"].empty());
  EXPECT_EQ(service->snapshot(), bg);

  r = client->Put("/model", tnm::to_json(Project(company.model)).dump(), "application/json");
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(service->snapshot().model, company.model);
}

TEST_F(Service, PutScenario) {
  json spec = {{"duration", 100},
               {"resources", {{{"object", company.router.value}, {"capacity", 2}, {"delay", 1.0}}}}};
  auto r = client->Put("/scenarios/second", spec.dump(), "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201);
  EXPECT_EQ(body(r)["name"], "second");
  r = client->Put("/scenarios/second", spec.dump(), "application/json");
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(service->snapshot().scenarios.size(), 2u);

  spec["resources"][0]["object"] = 999;
  r = client->Put("/scenarios/third", spec.dump(), "application/json");
  EXPECT_EQ(r->status, 404);
  spec["resources"] = {{{"object", company.router.value}}, {{"object", company.router.value}}};
  r = client->Put("/scenarios/third", spec.dump(), "application/json");
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(body(r)["error"], "conflict");
}

TEST_F(Service, RunMatchesDirectExecution) {
  auto r = post("/runs", {{"scenario", "company"}, {"seed", 11}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 202);
  const json handle = body(r);
  const std::string id = handle["run_id"];
  EXPECT_EQ(r->get_header_value("Location"), "/runs/" + id);
  EXPECT_EQ(handle["seed"], 11);
  EXPECT_EQ(handle["scenario"], "company");
  EXPECT_EQ(wait_done(id), "done");

  ScenarioSpec spec = company_scenario(company);
  spec.seed = 11;
  const SimLog direct = run(bind(company.model, spec));
  for (const auto& [param, format] : {std::pair{"csv", LogFormat::Csv}, std::pair{"jsonl", LogFormat::Jsonl}}) {
    auto log = client->Get("/runs/" + id + "/log?format=" + param);
    ASSERT_TRUE(log);
    EXPECT_EQ(log->status, 200);
    EXPECT_EQ(log->body, export_log(direct, format));
  }
  EXPECT_EQ(client->Get("/runs/" + id + "/log")->body, export_log(direct, LogFormat::Jsonl));
  EXPECT_EQ(client->Get("/runs/" + id + "/log?format=xml")->status, 400);

  auto summary = client->Get("/runs/" + id + "/summary");
  ASSERT_TRUE(summary);
  EXPECT_EQ(summary->status, 200);
  EXPECT_EQ(json::parse(summary->body), tnm::to_json(summarize(direct)));
}

TEST_F(Service, RunErrors) {
  EXPECT_EQ(post("/runs", {{"scenario", "nope"}})->status, 404);
  EXPECT_EQ(post("/runs", {{"seed", 1}})->status, 400);
  EXPECT_EQ(post("/runs", {{"scenario", "company"}, {"duration", -5}})->status, 422);
  EXPECT_EQ(client->Get("/runs/run-999")->status, 404);
  EXPECT_EQ(client->Get("/runs/run-999/log")->status, 404);
}

TEST_F(Service, NotFinishedAnswers409) {
  // A long run keeps the only worker busy so the second stays pending.
  TearDown();
  start({1, 16});
  BattleGroupOptions o;
  o.reports = true;
  o.duration = 36000;
  Project bg = make_battle_group(o);
  ASSERT_EQ(client->Put("/model", save(bg), "application/xml")->status, 200);
  const std::string first = body(post("/runs", {{"scenario", "battlegroup"}}))["run_id"];
  const std::string second = body(post("/runs", {{"scenario", "battlegroup"}}))["run_id"];
  auto r = client->Get("/runs/" + second + "/summary");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 409);
  EXPECT_EQ(body(r)["error"], "run-not-finished");
  EXPECT_EQ(wait_done(first), "done");
  EXPECT_EQ(wait_done(second), "done");
}

TEST_F(Service, EvictedRunsAnswer410) {
  TearDown();
  start({2, 2});
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) {
    ids.push_back(body(post("/runs", {{"scenario", "company"}, {"seed", i}}))["run_id"]);
    EXPECT_EQ(wait_done(ids.back()), "done");
  }
  EXPECT_EQ(client->Get("/runs/" + ids[0] + "/log")->status, 410);
  EXPECT_EQ(client->Get("/runs/" + ids[1] + "/summary")->status, 410);
  EXPECT_EQ(client->Get("/runs/" + ids[2] + "/log")->status, 200);
  EXPECT_EQ(client->Get("/runs/" + ids[3] + "/log")->status, 200);
  // The handle itself survives eviction.
  EXPECT_EQ(body(client->Get("/runs/" + ids[0]))["status"], "done");
}

TEST_F(Service, ConcurrentEditsSerialise) {
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([this] {
      httplib::Client c("127.0.0.1", client->port());
      for (int i = 0; i < 10; ++i) {
        c.Post("/objects", json{{"kind", "network"}, {"name", "n"}}.dump(), "application/json");
      }
    });
  }
  for (auto& t : threads) t.join();
  const Project snap = service->snapshot();
  EXPECT_EQ(snap.model.object_count(), 46u);
  EXPECT_EQ(service->version(), 41u);
  EXPECT_TRUE(snap.model.audit().empty());
}
