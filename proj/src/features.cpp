// SPDX-License-Identifier: Apache-2.0
#include "phishgen/features.hpp"

#include <algorithm>
#include <cctype>

#include "phishgen/error.hpp"

namespace phishgen {
namespace {

using json = nlohmann::json;

ParamSpec number(std::string name, json def, double min, double max, std::string desc,
                 bool exclusive_min = false) {
  return {std::move(name), ParamType::number, std::move(def), min, max, exclusive_min, {}, std::move(desc)};
}

ParamSpec integer(std::string name, json def, double min, double max, std::string desc) {
  return {std::move(name), ParamType::integer, std::move(def), min, max, false, {}, std::move(desc)};
}

ParamSpec range(std::string name, json def, double min, double max, std::string desc) {
  return {std::move(name), ParamType::number_range, std::move(def), min, max, false, {}, std::move(desc)};
}

ParamSpec choice(std::string name, std::string def, std::vector<std::string> choices, std::string desc) {
  return {std::move(name), ParamType::choice, json(std::move(def)), std::nullopt, std::nullopt, false,
          std::move(choices), std::move(desc)};
}

ParamSpec text(std::string name, json def, std::string desc) {
  return {std::move(name), ParamType::string, std::move(def), std::nullopt, std::nullopt, false, {}, std::move(desc)};
}

ParamSpec text_list(std::string name, std::vector<std::string> def, std::string desc) {
  return {std::move(name), ParamType::string_list, json(std::move(def)), std::nullopt, std::nullopt, false, {},
          std::move(desc)};
}

std::vector<FeatureInfo> build_catalog() {
  using F = FeatureId;
  using C = FeatureCategory;
  std::vector<FeatureInfo> c;
  c.push_back({F::C1, C::content, "Hypertext reference",
               "Anchor href values are replaced with in-page placeholders (#, #content, #skip, javascript:void(0)).",
               {number("fraction", 1.0, 0.0, 1.0, "share of anchors to rewrite (at least one)")}});
  c.push_back({F::C2, C::content, "Disable key functions",
               "A key handler suppresses F11 and Ctrl+U so the page source is harder to open.", {}});
  c.push_back({F::C3, C::content, "href lookalike characters",
               "Latin letters inside href values are swapped for visually confusable Unicode letters.",
               {number("probability", 0.3, 0.0, 1.0, "per-letter replacement probability", true),
                number("fraction", 1.0, 0.0, 1.0, "share of eligible anchors to rewrite (at least one)")}});
  c.push_back({F::C4, C::content, "Hide links appearing on status bar",
               "Link targets move to a data attribute and navigate from a click handler, so hovering shows no destination.",
               {number("fraction", 1.0, 0.0, 1.0, "share of anchors to hide (at least one)")}});
  c.push_back({F::C5, C::content, "Disable anchor tags",
               "Anchors become inert: clicks are cancelled and pointer interaction is switched off.", {}});
  c.push_back({F::C6, C::content, "Replace blank space with a character",
               "Spaces inside h1, p and span text become a filler character styled with a transparent colour.",
               {text("filler", "\xC2\xB7", "replacement character"),
                number("fraction", 1.0, 0.0, 1.0, "share of eligible elements to rewrite (at least one)")}});
  c.push_back({F::C7, C::content, "Save credentials",
               "Login forms post to a bundle-local capture sink; submissions are written to a local file only.", {}});
  c.push_back({F::C8, C::content, "Disable other login buttons",
               "Third-party sign-in buttons are disabled and the remaining login form posts to the local capture sink.",
               {text_list("brands", {"Google", "GitHub", "LinkedIn", "Facebook", "Apple", "Twitter"},
                          "third-party sign-in providers to match (case-insensitive)")}});
  c.push_back({F::C9, C::content, "Pop-up login",
               "Login and sign-up buttons open an injected modal login form that posts to the local capture sink.", {}});
  c.push_back({F::C10, C::content, "Pop-up login by clicking on anchors",
               "Anchor clicks open an injected modal login form that posts to the local capture sink.", {}});
  c.push_back({F::C11, C::content, "IFrame with login page",
               "An iframe showing a bundle-local login page (posting to the capture sink) is inserted after the login form.", {}});
  c.push_back({F::C12, C::content, "Add dummy tags",
               "Hidden no-op img, link, script, a and div elements are inserted to enlarge the DOM.",
               {integer("count", nullptr, 1, 500, "number of dummy elements (sampled in [5, 25] when omitted)")}});
  c.push_back({F::V1, C::visual, "Body opacity",
               "A style rule sets the page body opacity to a value sampled from the range.",
               {range("opacity_range", json::array({0.70, 0.95}), 0.0, 1.0, "body opacity sampling range")}});
  c.push_back({F::V2, C::visual, "Text styling",
               "A style rule overrides the page font family with one sampled from the list.",
               {text_list("fonts",
                          {"Georgia, serif", "Verdana, sans-serif", "\"Trebuchet MS\", sans-serif",
                           "Tahoma, sans-serif", "\"Times New Roman\", serif", "\"Courier New\", monospace"},
                          "font-family stacks to sample from")}});
  c.push_back({F::V3, C::visual, "Opacity on logo",
               "The primary .png/.svg logo is made partly transparent with opacity in [0.10, 0.35].",
               {range("opacity_range", json::array({0.10, 0.35}), 0.10, 0.35, "logo opacity sampling range")}});
  c.push_back({F::V4, C::visual, "Watermark on logo",
               "Text is stamped on the primary logo, in the bottom-right corner or along the diagonal.",
               {choice("placement", "random", {"random", "bottom_right", "diagonal"}, "watermark placement"),
                text("text", nullptr, "watermark text (defaults to the spoofed domain)"),
                number("mark_alpha", 0.4, 0.0, 1.0, "watermark opacity")}});
  c.push_back({F::V5, C::visual, "Image transformations",
               "The primary logo is rotated, blurred, overlaid with a grey mesh, or noised.",
               {choice("kind", "random", {"random", "rotate", "gaussian_blur", "grey_mesh", "noise"},
                       "transformation to apply"),
                number("angle", nullptr, 0.0, 360.0, "rotation magnitude in degrees (sampled in [5, 20] when omitted)", true),
                choice("direction", "random", {"random", "cw", "ccw"}, "rotation direction"),
                number("sigma", nullptr, 0.0, 50.0, "blur sigma (sampled in [1.0, 2.5] when omitted)", true),
                integer("spacing", 8, 1, 4096, "grey mesh spacing in pixels"),
                integer("line_width", 1, 1, 4096, "grey mesh line width in pixels"),
                number("mesh_alpha", 0.5, 0.0, 1.0, "grey mesh opacity", true),
                choice("distribution", "gaussian", {"gaussian", "uniform"}, "noise distribution"),
                number("strength", 12.0, 0.0, 255.0, "noise scale", true)}});
  return c;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

[[noreturn]] void bad_param(FeatureId id, const std::string& name, const std::string& what) {
  throw Error(ErrorCode::invalid_params,
              std::string(to_string(id)) + " parameter '" + name + "': " + what);
}

void check_bounds(FeatureId id, const ParamSpec& spec, double v) {
  if (spec.min && (spec.exclusive_min ? v <= *spec.min : v < *spec.min))
    bad_param(id, spec.name, "below minimum");
  if (spec.max && v > *spec.max) bad_param(id, spec.name, "above maximum");
}

void validate(FeatureId id, const ParamSpec& spec, const json& v) {
  switch (spec.type) {
    case ParamType::number:
      if (!v.is_number()) bad_param(id, spec.name, "expected a number");
      check_bounds(id, spec, v.get<double>());
      break;
    case ParamType::integer:
      if (!v.is_number_integer()) bad_param(id, spec.name, "expected an integer");
      check_bounds(id, spec, v.get<double>());
      break;
    case ParamType::string:
      if (!v.is_string() || v.get<std::string>().empty()) bad_param(id, spec.name, "expected a non-empty string");
      break;
    case ParamType::string_list:
      if (!v.is_array() || v.empty()) bad_param(id, spec.name, "expected a non-empty list of strings");
      for (const auto& item : v) {
        if (!item.is_string() || item.get<std::string>().empty())
          bad_param(id, spec.name, "expected a non-empty list of strings");
      }
      break;
    case ParamType::number_range:
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        bad_param(id, spec.name, "expected [low, high]");
      if (v[0].get<double>() > v[1].get<double>()) bad_param(id, spec.name, "low exceeds high");
      check_bounds(id, spec, v[0].get<double>());
      check_bounds(id, spec, v[1].get<double>());
      break;
    case ParamType::choice:
      if (!v.is_string() ||
          std::find(spec.choices.begin(), spec.choices.end(), v.get<std::string>()) == spec.choices.end())
        bad_param(id, spec.name, "not one of the allowed choices");
      break;
  }
}

}  // namespace

std::string_view to_string(FeatureId id) noexcept {
  static constexpr std::array<std::string_view, 17> kNames = {
      "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12",
      "V1", "V2", "V3", "V4", "V5"};
  return kNames[catalog_index(id)];
}

std::string_view to_string(FeatureCategory category) noexcept {
  return category == FeatureCategory::content ? "content" : "visual";
}

std::string_view to_string(ParamType type) noexcept {
  switch (type) {
    case ParamType::number: return "number";
    case ParamType::integer: return "integer";
    case ParamType::string: return "string";
    case ParamType::string_list: return "string_list";
    case ParamType::number_range: return "number_range";
    case ParamType::choice: return "choice";
  }
  return "unknown";
}

std::optional<FeatureId> parse_feature_id(std::string_view text) {
  const auto wanted = upper(text);
  for (auto id : kAllFeatures) {
    if (to_string(id) == wanted) return id;
  }
  return std::nullopt;
}

std::optional<FeatureCategory> parse_category(std::string_view text) {
  if (text == "content") return FeatureCategory::content;
  if (text == "visual") return FeatureCategory::visual;
  return std::nullopt;
}

std::vector<FeatureId> parse_feature_list(std::string_view text) {
  std::vector<FeatureId> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string token;
    for (char c : text.substr(start, end - start)) {
      if (!std::isspace(static_cast<unsigned char>(c))) token += c;
    }
    if (!token.empty()) {
      const auto id = parse_feature_id(token);
      if (!id) throw Error(ErrorCode::invalid_argument, "unknown feature id: " + token);
      out.push_back(*id);
    }
    start = end + 1;
  }
  return out;
}

const std::vector<FeatureInfo>& feature_catalog() {
  static const std::vector<FeatureInfo> catalog = build_catalog();
  return catalog;
}

const FeatureInfo& feature_info(FeatureId id) { return feature_catalog()[catalog_index(id)]; }

nlohmann::json catalog_to_json(std::optional<FeatureCategory> filter) {
  json features = json::array();
  for (const auto& info : feature_catalog()) {
    if (filter && info.category != *filter) continue;
    json params = json::array();
    for (const auto& p : info.params) {
      json entry = {{"name", p.name}, {"type", to_string(p.type)}, {"default", p.default_value},
                    {"description", p.description}};
      if (p.min) entry["min"] = *p.min;
      if (p.max) entry["max"] = *p.max;
      if (p.exclusive_min) entry["exclusive_min"] = true;
      if (!p.choices.empty()) entry["choices"] = p.choices;
      params.push_back(std::move(entry));
    }
    features.push_back({{"id", to_string(info.id)},
                        {"category", to_string(info.category)},
                        {"name", info.title},
                        {"description", info.description},
                        {"params", std::move(params)}});
  }
  return {{"schema_version", 1}, {"features", std::move(features)}};
}

ParamMap resolve_params(FeatureId id, const ParamMap& overrides) {
  const auto& info = feature_info(id);
  if (!overrides.is_null() && !overrides.is_object())
    throw Error(ErrorCode::invalid_params, std::string(to_string(id)) + " parameters must be an object");
  json resolved = json::object();
  if (overrides.is_object()) {
    for (const auto& [key, value] : overrides.items()) {
      const auto it = std::find_if(info.params.begin(), info.params.end(),
                                   [&](const ParamSpec& p) { return p.name == key; });
      if (it == info.params.end()) bad_param(id, key, "unknown parameter");
      if (!value.is_null()) validate(id, *it, value);
    }
  }
  for (const auto& p : info.params) {
    if (overrides.is_object() && overrides.contains(p.name) && !overrides[p.name].is_null()) {
      resolved[p.name] = overrides[p.name];
    } else {
      resolved[p.name] = p.default_value;
    }
  }
  return resolved;
}

}  // namespace phishgen
