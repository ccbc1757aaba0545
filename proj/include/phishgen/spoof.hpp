// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "phishgen/rng.hpp"

namespace phishgen {

enum class EditKind { homoglyph, prefix, suffix, tld_swap };
std::string_view to_string(EditKind kind) noexcept;

/// One change to a domain string. position is a byte offset into the domain
/// as it stood before this edit; before is the replaced text (empty for
/// prefix/suffix insertions).
struct SpoofEdit {
  EditKind kind = EditKind::homoglyph;
  std::size_t position = 0;
  std::string before;
  std::string after;

  friend bool operator==(const SpoofEdit&, const SpoofEdit&) = default;
};

struct SpoofRuleSet {
  /// key -> replacements, in file order.
  std::vector<std::pair<std::string, std::vector<std::string>>> homoglyphs;
  std::vector<std::string> prefixes;
  std::vector<std::string> suffixes;
  std::vector<std::string> tld_swaps;

  /// Throws Error(invalid_argument) on identity replacements, prefixes not
  /// ending in '-', suffixes not starting with '-', or characters outside
  /// [a-z0-9-].
  void validate() const;
};

SpoofRuleSet default_spoof_rules();
/// `kind<TAB>before<TAB>after` lines; kind is homoglyph, prefix, suffix or
/// tld. '#' starts a comment.
SpoofRuleSet parse_spoof_rules(std::string_view text);
SpoofRuleSet load_spoof_rules(const std::filesystem::path& path);

struct SpoofResult {
  std::string original_domain;
  std::string spoofed_domain;
  std::vector<SpoofEdit> edits;
};

nlohmann::json to_json(const SpoofResult& result);

/// subdomains + registrable label + public suffix ("www." "example" "co.uk").
struct DomainParts {
  std::string subdomains;  // with trailing dot, or empty
  std::string label;
  std::string suffix;
};
/// Throws Error(invalid_argument) for hosts without a label and a suffix.
DomainParts split_domain(std::string_view domain);

/// Applies between min_edits and max_edits (default min_edits+2) sampled
/// edits. Throws Error(no_applicable_rule) when fewer than min_edits are
/// possible.
SpoofResult spoof_domain(std::string_view domain, const SpoofRuleSet& rules, Rng& rng, int min_edits = 1,
                         std::optional<int> max_edits = std::nullopt);

/// Replays edits in order. Throws Error(invalid_argument) if an edit does
/// not match the text at its position.
std::string replay_edits(std::string_view domain, const std::vector<SpoofEdit>& edits);

/// Replaces the host of an absolute URL; everything else is kept verbatim.
std::string spoof_url(std::string_view url, const SpoofRuleSet& rules, Rng& rng, int min_edits = 1,
                      SpoofResult* result = nullptr);

}  // namespace phishgen
