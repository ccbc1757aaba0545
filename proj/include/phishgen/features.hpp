// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace phishgen {

enum class FeatureId : std::uint8_t {
  C1, C2, C3, C4, C5, C6, C7, C8, C9, C10, C11, C12,
  V1, V2, V3, V4, V5,
};

enum class FeatureCategory { content, visual };

inline constexpr std::array<FeatureId, 17> kAllFeatures = {
    FeatureId::C1, FeatureId::C2,  FeatureId::C3,  FeatureId::C4, FeatureId::C5, FeatureId::C6,
    FeatureId::C7, FeatureId::C8,  FeatureId::C9,  FeatureId::C10, FeatureId::C11, FeatureId::C12,
    FeatureId::V1, FeatureId::V2, FeatureId::V3, FeatureId::V4, FeatureId::V5};

inline constexpr std::size_t kContentFeatureCount = 12;
inline constexpr std::size_t kVisualFeatureCount = 5;

constexpr FeatureCategory category_of(FeatureId id) noexcept {
  return static_cast<int>(id) < static_cast<int>(FeatureId::V1) ? FeatureCategory::content
                                                                 : FeatureCategory::visual;
}

/// Position in catalog order (C1 = 0 ... V5 = 16).
constexpr std::size_t catalog_index(FeatureId id) noexcept { return static_cast<std::size_t>(id); }

std::string_view to_string(FeatureId id) noexcept;
std::string_view to_string(FeatureCategory category) noexcept;
std::optional<FeatureId> parse_feature_id(std::string_view text);
std::optional<FeatureCategory> parse_category(std::string_view text);

/// Parses "C1,C12,V3" (case-insensitive, spaces ignored). Throws
/// Error(invalid_argument) on unknown ids.
std::vector<FeatureId> parse_feature_list(std::string_view text);

/// Feature parameters are JSON objects: name -> value.
using ParamMap = nlohmann::json;

enum class ParamType { number, integer, string, string_list, number_range, choice };

std::string_view to_string(ParamType type) noexcept;

struct ParamSpec {
  std::string name;
  ParamType type;
  /// null means "sampled from the seeded source when not supplied".
  nlohmann::json default_value;
  std::optional<double> min;
  std::optional<double> max;
  bool exclusive_min = false;
  std::vector<std::string> choices;
  std::string description;
};

struct FeatureInfo {
  FeatureId id;
  FeatureCategory category;
  std::string title;
  std::string description;
  std::vector<ParamSpec> params;
};

const std::vector<FeatureInfo>& feature_catalog();
const FeatureInfo& feature_info(FeatureId id);

/// Catalog as structured text, optionally filtered by category.
nlohmann::json catalog_to_json(std::optional<FeatureCategory> filter = std::nullopt);

/// Validates overrides against the feature's schema and fills defaults.
/// Throws Error(invalid_params) on unknown names, wrong types or
/// out-of-range values.
ParamMap resolve_params(FeatureId id, const ParamMap& overrides);

}  // namespace phishgen
