// SPDX-License-Identifier: Apache-2.0
#include "phishgen/ledger.hpp"

#include "phishgen/error.hpp"

namespace phishgen {

nlohmann::json to_json(const FeatureApplication& app) {
  return {{"feature", to_string(app.feature)},
          {"params_used", app.params_used},
          {"touched_nodes", app.touched_nodes},
          {"injected_nodes", app.injected_nodes},
          {"assets_added", app.assets_added},
          {"notes", app.notes}};
}

FeatureApplication feature_application_from_json(const nlohmann::json& j) {
  FeatureApplication app;
  const auto id = parse_feature_id(j.at("feature").get<std::string>());
  if (!id) throw Error(ErrorCode::parse_error, "unknown feature in ledger: " + j.at("feature").dump());
  app.feature = *id;
  app.params_used = j.value("params_used", nlohmann::json::object());
  app.touched_nodes = j.value("touched_nodes", std::vector<NodeId>{});
  app.injected_nodes = j.value("injected_nodes", std::vector<NodeId>{});
  app.assets_added = j.value("assets_added", std::vector<std::string>{});
  app.notes = j.value("notes", std::string());
  return app;
}

}  // namespace phishgen
