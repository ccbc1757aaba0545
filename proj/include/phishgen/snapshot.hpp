// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace phishgen {

enum class AssetKind { stylesheet, script, image, font, other };
enum class FetchStatus { complete, partial };

std::string_view to_string(AssetKind kind) noexcept;
std::string_view to_string(FetchStatus status) noexcept;
std::optional<AssetKind> parse_asset_kind(std::string_view text);

struct AssetRecord {
  std::string original_url;
  AssetKind kind = AssetKind::other;
  std::string bytes;
  std::string content_type;

  bool missing() const noexcept { return bytes.empty(); }
  friend bool operator==(const AssetRecord&, const AssetRecord&) = default;
};

/// Local relative path (e.g. "assets/3f2a....css") -> asset.
using AssetMap = std::map<std::string, AssetRecord>;

/// A legitimate page as fetched: markup in UTF-8 plus localized assets.
struct WebpageSnapshot {
  std::string origin_url;
  std::string markup;
  AssetMap assets;
  std::int64_t fetched_at = 0;  // UTC seconds
  FetchStatus fetch_status = FetchStatus::complete;

  friend bool operator==(const WebpageSnapshot&, const WebpageSnapshot&) = default;
};

/// Writes page.html, assets/<hash>.<ext> and snapshot.json under dir.
void write_snapshot(const WebpageSnapshot& snapshot, const std::filesystem::path& dir);
WebpageSnapshot read_snapshot(const std::filesystem::path& dir);

/// MIME type for a file extension ("png" -> "image/png").
std::string content_type_for_extension(std::string_view ext);
/// Extension for a MIME type ("image/png" -> "png"), "" when unknown.
std::string extension_for_content_type(std::string_view content_type);

/// A relative path that stays inside its root: no absolute paths, no "..".
bool is_safe_relative_path(std::string_view path);

}  // namespace phishgen
