// Writes the sample models under data/.
#include <filesystem>
#include <iostream>

#include "tnm/fixtures.hpp"
#include "tnm/persistence.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(dir);

  tnm::save_file(tnm::Project(tnm::make_company_model().model), dir / "company_model.xml");

  tnm::BattleGroupOptions cap1;
  cap1.scenario_name = "bg-cap1";
  tnm::BattleGroupOptions cap2 = cap1;
  cap2.scenario_name = "bg-cap2";
  cap2.bg_capacity = 2;
  tnm::BattleGroupOptions reports = cap2;
  reports.scenario_name = "reports";
  reports.reports = true;
  tnm::BattleGroupOptions spread = reports;
  spread.scenario_name = "reports-offset";
  spread.report_offset_max = 30.0;

  tnm::Project bg = tnm::make_battle_group(cap1);
  for (const auto* o : {&cap2, &reports, &spread}) bg.scenarios.push_back(tnm::make_battle_group(*o).scenarios.front());
  tnm::save_file(bg, dir / "battlegroup.xml");
  std::cout << "wrote " << (dir / "company_model.xml").string() << " and " << (dir / "battlegroup.xml").string() << '\n';
}
