// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "phishgen/features.hpp"
#include "phishgen/html.hpp"
#include "phishgen/ledger.hpp"
#include "phishgen/rng.hpp"
#include "phishgen/snapshot.hpp"

namespace phishgen {

enum class LogoFormat { png, svg };
std::string_view to_string(LogoFormat format) noexcept;

struct LogoCandidate {
  NodeId node_id = 0;
  /// img src as written in the markup.
  std::string src;
  /// Key in the asset map; empty when located without one.
  std::string asset_path;
  LogoFormat extension = LogoFormat::png;
  bool in_header = false;
  bool named_logo = false;
  /// Pixel area from attributes or the PNG header, 0 when unknown.
  double area = 0;
};

/// img elements whose src is a .png/.svg, best first: inside header/nav,
/// then with "logo" in src/alt/id/class, then larger area, then document
/// order. With an asset map, only sources present (and downloaded) in it
/// count.
std::vector<LogoCandidate> locate_logo_candidates(const Document& doc, const AssetMap* assets);

struct VisualOptions {
  /// Seed that names derived assets ("<stem>.V5.<seed>.png").
  std::uint64_t seed = 0;
  /// Default watermark text.
  std::string watermark_text;
};

/// Applies one of V1..V5. Logo features act on the primary candidate, add
/// a new asset to `assets`, repoint the img and keep the original asset.
/// Throws Error(no_logo_candidate), Error(undecodable_image) or
/// Error(invalid_params).
FeatureApplication apply_visual_feature(Document& doc, AssetMap& assets, FeatureId feature, const ParamMap& params,
                                        Rng& rng, const VisualOptions& options = {});

/// Inserts a <text> watermark before the closing </svg>.
std::string watermark_svg(std::string_view svg, std::string_view text, bool diagonal, double alpha);

}  // namespace phishgen
