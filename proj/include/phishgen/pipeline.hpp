// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phishgen/applicability.hpp"
#include "phishgen/content_features.hpp"
#include "phishgen/features.hpp"
#include "phishgen/fetcher.hpp"
#include "phishgen/ledger.hpp"
#include "phishgen/snapshot.hpp"
#include "phishgen/spoof.hpp"

namespace phishgen {

enum class SelectionMode { explicit_list, random };

struct GenerationRecipe {
  SelectionMode mode = SelectionMode::random;
  /// Explicit mode only.
  std::vector<FeatureId> features;
  /// Random mode only; unset counts are sampled (content 3-6, visual 1-2).
  std::optional<int> count_content;
  std::optional<int> count_visual;
  std::uint64_t seed = 0;
  /// {"C3": {"probability": 0.5}, ...}
  nlohmann::json params = nlohmann::json::object();
  CaptureConfig capture;
  SpoofRuleSet spoof_rules = default_spoof_rules();
  int spoof_min_edits = 1;

  /// Throws Error(invalid_argument) for duplicates or bad counts and
  /// Error(conflicting_features) when C5 and C10 are both listed.
  void validate() const;
  const nlohmann::json& params_for(FeatureId id) const;
};

nlohmann::json to_json(const GenerationRecipe& recipe);
GenerationRecipe recipe_from_json(const nlohmann::json& j);

struct SkippedFeature {
  FeatureId feature;
  std::string reason;

  friend bool operator==(const SkippedFeature&, const SkippedFeature&) = default;
};

struct Selection {
  std::vector<FeatureId> features;  // canonical order
  std::vector<SkippedFeature> skipped;
  std::vector<std::string> notes;
};

/// Explicit mode filters to applicable features; random mode samples from
/// the applicable pools. C5 and C10 never both appear. Throws
/// Error(feature_not_applicable) when an explicit list has nothing usable.
Selection select_features(const ApplicabilityReport& report, const GenerationRecipe& recipe, Rng& rng);

struct GeneratedBundle {
  std::string id;
  std::string source_url;
  std::string spoofed_url;
  SpoofResult spoof;
  std::string document;
  AssetMap assets;
  std::vector<FeatureApplication> ledger;
  std::vector<SkippedFeature> skipped;
  GenerationRecipe recipe;
  std::int64_t created_at = 0;
};

/// Lower-case 16-digit hex.
std::string hex_id(std::uint64_t value);

/// Parse, analyze, select, apply in canonical order, spoof, serialize.
/// Throws Error(empty_ledger) when nothing could be applied.
GeneratedBundle generate(const WebpageSnapshot& snapshot, const GenerationRecipe& recipe);

/// index.html, assets/..., capture files, ledger.json, recipe.json and
/// bundle.json under dir.
void write_bundle(const GeneratedBundle& bundle, const std::filesystem::path& dir);
GeneratedBundle read_bundle(const std::filesystem::path& dir);

/// One page to turn into a bundle: an http(s) URL or a local HTML file.
struct BatchInput {
  std::string source;
  /// For local files: the URL the page pretends to come from.
  std::optional<std::string> origin;
};

/// Loads an input into a localized snapshot. Local files resolve relative
/// assets from their own directory; their origin defaults to a canonical or
/// base href in the file, else https://<stem>.example/<file name>.
WebpageSnapshot load_input(const BatchInput& input, const FetchPolicy& policy);

struct ManifestEntry {
  std::string id;
  std::string source_url;
  std::string bundle_path;
  std::string spoofed_url;
  std::uint64_t seed = 0;
  std::vector<std::string> features;
};

struct ManifestFailure {
  std::string source;
  std::string error;
};

struct CorpusManifest {
  int schema_version = 1;
  std::vector<ManifestEntry> entries;
  std::vector<ManifestFailure> failures;
  std::size_t inputs = 0;
};

nlohmann::json to_json(const CorpusManifest& manifest);

/// Per-input seed: derive_seed(template seed, source URL).
std::uint64_t per_input_seed(std::uint64_t template_seed, std::string_view source_url);

/// Generates one bundle per input under out_dir/<id>/ and writes
/// out_dir/manifest.json. Failures are recorded, never fatal. Throws
/// Error(invalid_argument) for an empty input list.
CorpusManifest batch_generate(const std::vector<BatchInput>& inputs, const GenerationRecipe& recipe_template,
                              const std::filesystem::path& out_dir, const FetchPolicy& policy = {},
                              unsigned threads = 0);
/// Same, for snapshots already in memory.
CorpusManifest batch_generate(const std::vector<WebpageSnapshot>& inputs, const GenerationRecipe& recipe_template,
                              const std::filesystem::path& out_dir, unsigned threads = 0);

enum class LogoTransform { opacity, watermark, rotate, blur, grey_mesh, noise };
std::string_view to_string(LogoTransform t) noexcept;
std::optional<LogoTransform> parse_logo_transform(std::string_view text);

/// One bundle per transform. Content features are chosen once and shared;
/// only the logo entry differs. Throws Error(no_logo_candidate).
std::vector<GeneratedBundle> generate_logo_variants(const WebpageSnapshot& snapshot, const GenerationRecipe& base,
                                                    const std::vector<LogoTransform>& transforms);

}  // namespace phishgen
