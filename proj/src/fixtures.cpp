#include "tnm/fixtures.hpp"

#include <cmath>

#include "tnm/error.hpp"

namespace tnm {

CompanyModel make_company_model() {
  CompanyModel m{Model("Company Model"), {}, {}, {}, {}, {}, {}};
  Model& model = m.model;
  m.data_network = model.add_object(kRootId, ObjectKind::AreaNetwork, "DataNetwork");
  m.platoon = model.add_object(kRootId, ObjectKind::Composite, "Platoon");
  m.afv = model.add_object(m.platoon, ObjectKind::Composite, "AFV");
  m.data_radio = model.add_object(m.afv, ObjectKind::Network, "Data Radio");
  m.router = model.add_object(m.afv, ObjectKind::Network, "Router");
  m.terminal = model.add_object(m.afv, ObjectKind::Network, "Terminal");
  model.connect(model.default_interface(m.router), model.default_interface(m.data_radio));
  model.connect(model.default_interface(m.router), model.default_interface(m.terminal));
  model.connect(model.default_interface(m.data_radio), model.default_interface(m.data_network));
  return m;
}

namespace {

class BattleGroupBuilder {
 public:
  explicit BattleGroupBuilder(const BattleGroupOptions& o) : opt_(o), project_(Model("Battlegroup")) {
    ScenarioSpec s;
    s.name = o.scenario_name;
    s.duration = o.duration;
    s.seed = o.seed;
    project_.scenarios.push_back(std::move(s));
  }

  Project build() {
    const ObjectId bg_net = network(kRootId, "BGDataNetwork", opt_.bg_capacity);

    const ObjectId bg_hq = composite(kRootId, "BG HQ");
    const ObjectId bg_radio = node(bg_hq, "Data Radio");
    const ObjectId bg_router = router(bg_hq);
    const ObjectId bg_terminal = terminal(bg_hq);
    link(bg_router, bg_radio);
    link(bg_router, bg_terminal);
    link(bg_radio, bg_net);

    const ObjectId company = composite(kRootId, "Company");
    const ObjectId coy_net = network(company, "CoyDataNetwork", opt_.company_capacity);
    const ObjectId coy_hq = composite(company, "Coy HQ");
    const ObjectId hq_radio = node(coy_hq, "Data Radio");
    const ObjectId hq_uplink = node(coy_hq, "Data Radio 2");
    const ObjectId hq_router = router(coy_hq);
    const ObjectId hq_terminal = terminal(coy_hq);
    link(hq_router, hq_radio);
    link(hq_router, hq_uplink);
    link(hq_router, hq_terminal);
    link(hq_radio, coy_net);
    link(hq_uplink, bg_net);

    const ObjectId platoon = composite(company, "Platoon");
    const ObjectId afv = composite(platoon, "AFV");
    const ObjectId afv_radio = node(afv, "Data Radio");
    const ObjectId afv_router = router(afv);
    const ObjectId afv_terminal = terminal(afv);
    link(afv_router, afv_radio);
    link(afv_router, afv_terminal);
    link(afv_radio, coy_net);
    if (opt_.reports) {
      MessageTaskSpec report;
      report.label = kReportLabel;
      report.source = afv_terminal;
      report.destination = hq_terminal;
      report.repeats = repeats_for(opt_.report_interval);
      report.interval_mean = opt_.report_interval;
      report.interval_sigma = opt_.report_sigma;
      report.request_ack = true;
      report.send_offset_max = opt_.report_offset_max;
      scenario().tasks.push_back(report);
    }

    // Attached resources, services and tasks travel with every copy.
    for (int i = 0; i < 2; ++i) project_.copy_subtree(afv);
    for (int i = 0; i < 2; ++i) project_.copy_subtree(platoon);
    for (int i = 0; i < 2; ++i) project_.copy_subtree(company);

    const char* companies[] = {"Company", "Company.1", "Company.2"};
    for (int c = 0; c < 3; ++c) {
      MessageTaskSpec pos;
      pos.label = kPositionLabel;
      pos.source = find(std::string(companies[c]) + "/Platoon/AFV/Terminal");
      pos.destination = find(std::string(companies[(c + 1) % 3]) + "/Platoon/AFV/Terminal");
      pos.repeats = repeats_for(opt_.position_interval);
      pos.interval_mean = opt_.position_interval;
      pos.interval_sigma = opt_.position_sigma;
      scenario().tasks.push_back(pos);
    }
    return std::move(project_);
  }

 private:
  ScenarioSpec& scenario() { return project_.scenarios.front(); }
  Model& model() { return project_.model; }

  std::uint32_t repeats_for(double interval) const {
    return static_cast<std::uint32_t>(std::ceil(opt_.duration / interval));
  }

  ObjectId find(const std::string& path) {
    auto id = model().find_object(path);
    if (!id) throw Error(Errc::not_found, path);
    return *id;
  }

  ObjectId composite(ObjectId parent, const char* name) {
    return model().add_object(parent, ObjectKind::Composite, name);
  }
  ObjectId node(ObjectId parent, const char* name) { return model().add_object(parent, ObjectKind::Network, name); }

  ObjectId network(ObjectId parent, const char* name, int capacity) {
    ObjectId id = model().add_object(parent, ObjectKind::AreaNetwork, name);
    scenario().resources.push_back({id, capacity, opt_.network_delay});
    return id;
  }
  ObjectId router(ObjectId parent) {
    ObjectId id = node(parent, "Router");
    scenario().resources.push_back({id, 1, opt_.router_delay});
    return id;
  }
  ObjectId terminal(ObjectId parent) {
    ObjectId id = node(parent, "Terminal");
    scenario().services.push_back({id, 0.0, ServiceKind::AckResponder});
    return id;
  }
  void link(ObjectId a, ObjectId b) { model().connect(model().default_interface(a), model().default_interface(b)); }

  const BattleGroupOptions& opt_;
  Project project_;
};

}  // namespace

Project make_battle_group(const BattleGroupOptions& options) { return BattleGroupBuilder(options).build(); }

}  // namespace tnm
