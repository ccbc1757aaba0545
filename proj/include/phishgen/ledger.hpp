// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "phishgen/features.hpp"
#include "phishgen/html.hpp"

namespace phishgen {

/// Provenance record for one applied feature.
struct FeatureApplication {
  FeatureId feature = FeatureId::C1;
  ParamMap params_used = nlohmann::json::object();
  std::vector<NodeId> touched_nodes;
  std::vector<NodeId> injected_nodes;
  /// Bundle-relative paths of assets this application wrote.
  std::vector<std::string> assets_added;
  std::string notes;

  friend bool operator==(const FeatureApplication&, const FeatureApplication&) = default;
};

nlohmann::json to_json(const FeatureApplication& app);
FeatureApplication feature_application_from_json(const nlohmann::json& j);

}  // namespace phishgen
