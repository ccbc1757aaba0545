// SPDX-License-Identifier: Apache-2.0
#include "phishgen/applicability.hpp"

#include <algorithm>
#include <cctype>

#include "phishgen/content_features.hpp"
#include "phishgen/visual_features.hpp"

namespace phishgen {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool is_button_like(const Node& node) {
  if (!node.is_element()) return false;
  if (node.is_element("button")) return true;
  if (node.is_element("input")) {
    const auto* type = node.attribute("type");
    const auto t = type ? lower(*type) : std::string();
    return t == "submit" || t == "button" || t == "image";
  }
  if (const auto* role = node.attribute("role"); role && lower(*role) == "button") return true;
  return false;
}

// Visible label plus the attributes that commonly carry one.
std::string label_of(const Node& node) {
  std::string label = text_content(node);
  for (const char* name : {"value", "aria-label", "title", "alt", "id", "class", "data-provider"}) {
    if (const auto* v = node.attribute(name)) {
      label += ' ';
      label += *v;
    }
  }
  // alt text of images inside the control
  std::vector<const Node*> stack{&node};
  while (!stack.empty()) {
    const auto* n = stack.back();
    stack.pop_back();
    for (const auto& c : n->children()) {
      if (c->is_element("img")) {
        if (const auto* alt = c->attribute("alt")) label += ' ' + *alt;
      }
      stack.push_back(c.get());
    }
  }
  return lower(label);
}

template <typename Range>
bool contains_any(const std::string& haystack, const Range& needles) {
  return std::any_of(std::begin(needles), std::end(needles),
                     [&](std::string_view n) { return haystack.find(n) != std::string::npos; });
}

constexpr std::string_view kSignInWords[] = {
    "sign in", "sign-in", "signin", "log in", "log-in", "login", "continue with", "connect with",
    "sign up", "sign-up", "signup"};

}  // namespace

bool is_unconditional(FeatureId id) noexcept {
  return id == FeatureId::C2 || id == FeatureId::C12 || id == FeatureId::V1 || id == FeatureId::V2;
}

std::vector<FeatureId> ApplicabilityReport::applicable_features() const {
  std::vector<FeatureId> out;
  for (const auto& e : entries) {
    if (e.applicable) out.push_back(e.id);
  }
  return out;
}

bool is_link_anchor(const Node& node) { return node.is_element("a") && node.has_attribute("href"); }

bool is_login_form(const Node& node) {
  if (!node.is_element("form")) return false;
  std::vector<const Node*> stack{&node};
  while (!stack.empty()) {
    const auto* n = stack.back();
    stack.pop_back();
    for (const auto& c : n->children()) {
      if (c->is_element("input")) {
        if (const auto* type = c->attribute("type"); type && lower(*type) == "password") return true;
      }
      stack.push_back(c.get());
    }
  }
  return false;
}

bool is_third_party_login_button(const Node& node, const std::vector<std::string>& brands) {
  const bool control = is_button_like(node);
  if (!control && !node.is_element("a")) return false;
  const auto label = label_of(node);
  const bool brand = std::any_of(brands.begin(), brands.end(), [&](const std::string& b) {
    return !b.empty() && label.find(lower(b)) != std::string::npos;
  });
  if (!brand) return false;
  return control || contains_any(label, kSignInWords);
}

bool is_login_trigger(const Node& node) {
  if (!is_button_like(node) && !node.is_element("a")) return false;
  const auto label = label_of(node);
  static constexpr std::string_view kTriggerWords[] = {"sign in", "sign-in", "signin", "log in", "log-in",
                                                       "login", "sign up", "sign-up", "signup", "register"};
  return contains_any(label, kTriggerWords);
}

bool has_spaced_text(const Node& node) {
  if (!(node.is_element("h1") || node.is_element("p") || node.is_element("span"))) return false;
  for (const auto& c : node.children()) {
    if (!c->is_text()) continue;
    const auto& t = c->data();
    bool seen_word = false;
    bool pending_space = false;
    for (char ch : t) {
      if (is_space(ch)) {
        if (seen_word) pending_space = true;
      } else {
        if (pending_space) return true;
        seen_word = true;
      }
    }
  }
  return false;
}

bool href_has_confusable_letter(std::string_view href) {
  return !confusable_positions(href).empty();
}

ApplicabilityReport analyze_applicability(const Document& doc, const AssetMap* assets,
                                          const ApplicabilityOptions& options) {
  ApplicabilityReport report;
  for (auto id : kAllFeatures) report.entries[catalog_index(id)].id = id;
  auto mark = [&](FeatureId id, NodeId node, std::string reason) {
    auto& e = report.entries[catalog_index(id)];
    e.applicable = true;
    e.evidence.push_back({node, std::move(reason)});
  };

  for (const char* key : {"a", "form", "input[type=password]", "button", "img", "h1", "p", "span", "iframe"})
    report.counts[key] = 0;

  std::vector<const Node*> login_forms;
  std::vector<const Node*> brand_buttons;
  std::vector<const Node*> anchors;
  doc.visit([&](const Node& n) {
    if (!n.is_element()) return;
    const auto& tag = n.tag();
    if (auto it = report.counts.find(tag); it != report.counts.end()) ++it->second;
    if (n.is_element("input")) {
      if (const auto* type = n.attribute("type"); type && lower(*type) == "password")
        ++report.counts["input[type=password]"];
    }
    if (is_link_anchor(n)) anchors.push_back(&n);
    if (is_login_form(n)) login_forms.push_back(&n);
    if (is_third_party_login_button(n, options.login_brands)) brand_buttons.push_back(&n);
    if (has_spaced_text(n)) mark(FeatureId::C6, n.id(), "text with whitespace in <" + tag + ">");
  });

  for (const auto* a : anchors) {
    for (auto id : {FeatureId::C1, FeatureId::C4, FeatureId::C5, FeatureId::C10, FeatureId::C12})
      mark(id, a->id(), "anchor with href");
    if (href_has_confusable_letter(*a->attribute("href")))
      mark(FeatureId::C3, a->id(), "anchor href with replaceable letters");
  }
  for (const auto* f : login_forms) {
    for (auto id : {FeatureId::C7, FeatureId::C9, FeatureId::C11}) mark(id, f->id(), "form with password input");
  }
  if (!login_forms.empty()) {
    for (const auto* b : brand_buttons) mark(FeatureId::C8, b->id(), "third-party login button");
    if (!brand_buttons.empty()) mark(FeatureId::C8, login_forms.front()->id(), "login form");
  }
  for (auto id : {FeatureId::C2, FeatureId::C12, FeatureId::V1, FeatureId::V2})
    report.entries[catalog_index(id)].applicable = true;

  for (const auto& candidate : locate_logo_candidates(doc, assets)) {
    for (auto id : {FeatureId::V3, FeatureId::V4, FeatureId::V5})
      mark(id, candidate.node_id, "logo candidate ." + std::string(to_string(candidate.extension)));
  }
  return report;
}

nlohmann::json to_json(const ApplicabilityReport& report) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& e : report.entries) {
    const auto& info = feature_info(e.id);
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& ev : e.evidence) evidence.push_back({{"node", ev.node}, {"reason", ev.reason}});
    features.push_back({{"id", to_string(e.id)},
                        {"category", to_string(info.category)},
                        {"applicable", e.applicable},
                        {"evidence_count", e.evidence.size()},
                        {"evidence", std::move(evidence)},
                        {"description", info.description}});
  }
  return {{"schema_version", 1}, {"features", std::move(features)}, {"counts", report.counts}};
}

}  // namespace phishgen
