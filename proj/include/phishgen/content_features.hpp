// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "phishgen/features.hpp"
#include "phishgen/html.hpp"
#include "phishgen/ledger.hpp"
#include "phishgen/rng.hpp"

namespace phishgen {

enum class CaptureMode { local_file };

/// Where injected login forms send their fields. Everything is relative to
/// the bundle directory; nothing is ever sent off-host.
struct CaptureConfig {
  CaptureMode mode = CaptureMode::local_file;
  std::string capture_path = "capture";
  std::string capture_script_name = "capture.js";
  std::string login_page_name = "login.html";

  friend bool operator==(const CaptureConfig&, const CaptureConfig&) = default;
};

/// Throws Error(invalid_argument) unless every path is a plain bundle-local
/// relative path.
void validate(const CaptureConfig& cfg);
nlohmann::json to_json(const CaptureConfig& cfg);
CaptureConfig capture_config_from_json(const nlohmann::json& j);

/// Placeholder hrefs used by C1.
inline constexpr std::array<std::string_view, 4> kPlaceholderHrefs = {"#", "#content", "#skip",
                                                                       "javascript:void(0)"};

/// Lookalike letters for a-z, 1-3 UTF-8 variants each. Variants are unique
/// across letters so every replacement can be inverted.
const std::vector<std::vector<std::string>>& confusable_table();
/// Parses "letter<TAB>variant variant ..." lines.
std::vector<std::vector<std::string>> parse_confusable_table(std::string_view text);
/// Byte offsets of replaceable letters in an href (scheme prefix excluded).
std::vector<std::size_t> confusable_positions(std::string_view href);
/// Maps every lookalike back to its ASCII letter.
std::string undo_confusables(std::string_view text);

/// Applies one of C1..C12 in place. Throws Error(feature_not_applicable)
/// when the tree has nothing the feature can act on, Error(invalid_params)
/// for bad parameters.
FeatureApplication apply_content_feature(Document& doc, FeatureId feature, const ParamMap& params, Rng& rng,
                                         const CaptureConfig& capture = {});

/// Value-semantics form: returns the transformed copy.
std::pair<Document, FeatureApplication> apply_content_feature(const Document& doc, FeatureId feature,
                                                              const ParamMap& params, Rng& rng,
                                                              const CaptureConfig& capture = {});

/// Capture handler script and the stand-alone login page used by C11, as
/// (bundle-relative path, bytes).
std::vector<std::pair<std::string, std::string>> build_capture_assets(const CaptureConfig& cfg);

/// True for features whose output posts to the capture sink.
bool uses_capture(FeatureId id) noexcept;

/// Text as rendered when transparent filler spans read as spaces.
std::string rendered_text(const Node& node);

}  // namespace phishgen
