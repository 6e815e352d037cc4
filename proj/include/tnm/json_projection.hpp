#pragma once

#include <json.hpp>

#include "tnm/scenario.hpp"

namespace tnm {

// JSON view of a project: model name, next id, a flat object list (with
// parent, children and interfaces), connections and scenarios.
nlohmann::json to_json(const Project& project);

// Rebuilds and validates a project; same errors as load().
Project project_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ScenarioSpec& scenario);
ScenarioSpec scenario_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const RunSummary& summary);
nlohmann::json object_json(const Model& model, ObjectId id);

}  // namespace tnm
