#pragma once
#include <json.hpp>
#include <string>

#include "grres/verify.hpp"

namespace grres {

using json = nlohmann::json;

json relations_json(const Model& M);
json chart_json(const TowerRun& R, int id, const GammaRun* G = nullptr);
json tower_manifest(const TowerRun& R, const json& config);
json gamma_json(const GammaRun& G);
json smoothness_json(const SmoothnessReport& S);
json audit_json(const TowerAudit& T);

// Two-space indentation, trailing newline.
std::string dump(const json& j);

}  // namespace grres
