// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "phishgen/features.hpp"
#include "phishgen/html.hpp"
#include "phishgen/snapshot.hpp"

namespace phishgen {

struct Evidence {
  NodeId node;
  std::string reason;
};

struct FeatureApplicability {
  FeatureId id = FeatureId::C1;
  bool applicable = false;
  std::vector<Evidence> evidence;
};

/// Which catalog features a page can host, with the nodes that justify it.
struct ApplicabilityReport {
  std::array<FeatureApplicability, 17> entries;
  /// Occurrence counts for a, form, input[type=password], button, img, h1,
  /// p, span and iframe.
  std::map<std::string, std::size_t> counts;

  const FeatureApplicability& at(FeatureId id) const { return entries[catalog_index(id)]; }
  bool applicable(FeatureId id) const { return at(id).applicable; }
  std::vector<FeatureId> applicable_features() const;
};

struct ApplicabilityOptions {
  std::vector<std::string> login_brands = {"Google", "GitHub", "LinkedIn", "Facebook", "Apple", "Twitter"};
};

/// Features that need no page precondition.
bool is_unconditional(FeatureId id) noexcept;

/// Applies the trigger table. When assets are given, logo candidates must
/// resolve to a localized .png/.svg asset; otherwise the img src extension
/// alone decides.
ApplicabilityReport analyze_applicability(const Document& doc, const AssetMap* assets = nullptr,
                                          const ApplicabilityOptions& options = {});

nlohmann::json to_json(const ApplicabilityReport& report);

// Trigger predicates, shared with the transformations so each one checks
// exactly what analysis promised.

/// <a> element carrying an href.
bool is_link_anchor(const Node& node);
/// <form> with a password input among its descendants.
bool is_login_form(const Node& node);
/// Button-like element naming one of the brands, either as a control or
/// next to sign-in wording.
bool is_third_party_login_button(const Node& node, const std::vector<std::string>& brands);
/// Button-like element labelled log in / sign in / sign up / register.
bool is_login_trigger(const Node& node);
/// h1/p/span with a direct text child containing whitespace between words.
bool has_spaced_text(const Node& node);
/// Letters that can be swapped for a lookalike (used by C3).
bool href_has_confusable_letter(std::string_view href);

}  // namespace phishgen
