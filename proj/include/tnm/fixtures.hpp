#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tnm/scenario.hpp"

namespace tnm {

// The single-AFV company model: a DataNetwork area network and a Platoon
// holding one AFV (Data Radio, Router, Terminal). Three connections:
// Router-Data Radio, Router-Terminal, Data Radio-DataNetwork.
struct CompanyModel {
  Model model;
  ObjectId data_network;
  ObjectId platoon;
  ObjectId afv;
  ObjectId data_radio;
  ObjectId router;
  ObjectId terminal;
};

CompanyModel make_company_model();

// Battlegroup of three companies (Coy HQ plus three platoons of three AFVs,
// all on a company data network) joined through a BG data network reached
// from the second radio of every Coy HQ, plus a BG HQ.
struct BattleGroupOptions {
  std::string scenario_name = "battlegroup";
  double network_delay = 2.0;
  double router_delay = 0.5;
  int company_capacity = 1;
  int bg_capacity = 1;
  // Cross-company position reports: one sender per company to the matching
  // AFV of the next company.
  double position_interval = 60.0;
  double position_sigma = 2.0;
  // Reports and returns: every AFV terminal to its Coy HQ terminal with an
  // acknowledgement.
  bool reports = false;
  double report_interval = 300.0;
  double report_sigma = 0.0;
  double report_offset_max = 0.0;
  double duration = 36000.0;
  std::uint64_t seed = 1;
};

inline constexpr const char* kPositionLabel = "position-report";
inline constexpr const char* kReportLabel = "report-return";

// Model plus one scenario named options.scenario_name. The model built for
// any options is identical, so scenarios from several calls can share it.
Project make_battle_group(const BattleGroupOptions& options);

}  // namespace tnm
