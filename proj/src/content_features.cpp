// SPDX-License-Identifier: Apache-2.0
#include "phishgen/content_features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "phishgen/applicability.hpp"
#include "phishgen/error.hpp"
#include "phishgen/url.hpp"

namespace phishgen {
namespace {

using json = nlohmann::json;

constexpr std::string_view kModalId = "login-overlay";
constexpr std::string_view kTriggerAttr = "data-login-trigger";

std::vector<std::vector<std::string>> builtin_confusables() {
  // Mirrors data/confusables.tsv (checked by the unit tests).
  return {
      {"\xC4\x81", "\xC3\xA1", "\xC3\xA4"},      // a
      {"\xE1\xB8\x83", "\xE1\xB8\x85"},          // b
      {"\xC3\xA7", "\xC4\x87", "\xC4\x8B"},      // c
      {"\xC4\x8F", "\xE1\xB8\x8B"},              // d
      {"\xC3\xA9", "\xC3\xAB", "\xC4\x93"},      // e
      {"\xE1\xB8\x9F"},                          // f
      {"\xC4\xA3", "\xC4\xA1"},                  // g
      {"\xC4\xA5", "\xE1\xB8\xA3"},              // h
      {"\xC3\xAD", "\xC3\xAF", "\xC4\xAB"},      // i
      {"\xC4\xB5"},                              // j
      {"\xC4\xB7", "\xE1\xB8\xB3"},              // k
      {"\xC4\xBA", "\xC4\xBC"},                  // l
      {"\xE1\xB9\x81", "\xE1\xB9\x83"},          // m
      {"\xC3\xB1", "\xC5\x84", "\xC5\x86"},      // n
      {"\xC3\xB3", "\xC3\xB6", "\xC5\x8D"},      // o
      {"\xE1\xB9\x97", "\xD1\x80"},              // p
      {"\xD4\x9B"},                              // q
      {"\xC5\x95", "\xC5\x99"},                  // r
      {"\xC5\x9B", "\xC5\x9F", "\xD1\x95"},      // s
      {"\xC5\xA3", "\xC5\xA5"},                  // t
      {"\xC3\xBA", "\xC3\xBC", "\xC5\xAB"},      // u
      {"\xE1\xB9\xBF", "\xCE\xBD"},              // v
      {"\xC5\xB5", "\xE1\xBA\x81"},              // w
      {"\xE1\xBA\x8B", "\xD1\x85"},              // x
      {"\xC3\xBD", "\xC3\xBF"},                  // y
      {"\xC5\xBA", "\xC5\xBC", "\xC5\xBE"},      // z
  };
}

double number_param(const ParamMap& p, const char* name, double fallback) {
  if (p.contains(name) && p[name].is_number()) return p[name].get<double>();
  return fallback;
}

// Chooses max(1, round(fraction * n)) of n candidates, kept in document order.
template <typename T>
std::vector<T> choose_fraction(const std::vector<T>& items, double fraction, Rng& rng) {
  if (items.empty()) return {};
  auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(items.size())));
  k = std::clamp<std::size_t>(k, 1, items.size());
  if (k == items.size()) return items;
  std::vector<std::size_t> idx(items.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.shuffle(idx);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::vector<T> out;
  out.reserve(k);
  for (auto i : idx) out.push_back(items[i]);
  return out;
}

[[noreturn]] void not_applicable(FeatureId id, const std::string& why) {
  throw Error(ErrorCode::feature_not_applicable, std::string(to_string(id)) + ": " + why);
}

// Where injected scripts and styles go. Never creates elements, so element
// counts only change by what the ledger records.
Node& injection_parent(Document& doc, bool prefer_head) {
  if (prefer_head) {
    if (auto* head = doc.first_element("head")) return *head;
  }
  if (auto* body = doc.first_element("body")) return *body;
  if (auto* html = doc.first_element("html")) return *html;
  return doc.root();
}

Node& append_element(Document& doc, Node& parent, std::string tag, std::vector<Attribute> attrs,
                     FeatureApplication& app, std::string text = {}) {
  auto& node = parent.append_child(doc.make_element(std::move(tag), std::move(attrs)));
  app.injected_nodes.push_back(node.id());
  if (!text.empty()) {
    auto& t = node.append_child(doc.make_text(std::move(text)));
    app.injected_nodes.push_back(t.id());
  }
  return node;
}

std::vector<Node*> collect(Document& doc, bool (*pred)(const Node&)) {
  std::vector<Node*> out;
  doc.visit([&](Node& n) {
    if (pred(n)) out.push_back(&n);
  });
  return out;
}

// --- shared capture helpers -------------------------------------------------

void ensure_capture_script(Document& doc, const CaptureConfig& cfg, FeatureApplication& app) {
  for (auto* s : doc.elements("script")) {
    if (const auto* src = s->attribute("src"); src && *src == cfg.capture_script_name) return;
  }
  append_element(doc, injection_parent(doc, false), "script", {{"src", cfg.capture_script_name}}, app);
}

void rewrite_login_forms(Document& doc, const CaptureConfig& cfg, FeatureApplication& app) {
  for (auto* form : collect(doc, is_login_form)) {
    form->set_attribute("action", cfg.capture_path);
    form->set_attribute("method", "post");
    app.touched_nodes.push_back(form->id());
  }
  ensure_capture_script(doc, cfg, app);
}

// Injects the modal login form (once per document) and its wiring script.
void ensure_modal(Document& doc, const CaptureConfig& cfg, FeatureApplication& app) {
  for (auto* div : doc.elements("div")) {
    if (const auto* id = div->attribute("id"); id && *id == kModalId) return;
  }
  auto& parent = injection_parent(doc, false);
  auto& overlay = append_element(
      doc, parent, "div",
      {{"id", std::string(kModalId)},
       {"style",
        "display:none;position:fixed;top:0;left:0;right:0;bottom:0;z-index:2147483646;"
        "background:rgba(0,0,0,0.45);align-items:center;justify-content:center;font-family:inherit;"}},
      app);
  auto& box = append_element(doc, overlay, "div",
                             {{"style",
                               "background:#fff;color:#222;padding:24px 28px;border-radius:8px;min-width:280px;"
                               "box-shadow:0 8px 32px rgba(0,0,0,0.3);font-family:inherit;"}},
                             app);
  append_element(doc, box, "p", {{"style", "margin:0 0 12px;font-size:1.2em;font-weight:bold;"}}, app, "Sign in");
  auto& form = append_element(doc, box, "form", {{"action", cfg.capture_path}, {"method", "post"}}, app);
  const std::string field = "display:block;width:100%;margin:0 0 10px;padding:8px;box-sizing:border-box;font-family:inherit;";
  append_element(doc, form, "input",
                 {{"type", "text"}, {"name", "username"}, {"placeholder", "Email or username"},
                  {"autocomplete", "username"}, {"style", field}},
                 app);
  append_element(doc, form, "input",
                 {{"type", "password"}, {"name", "password"}, {"placeholder", "Password"},
                  {"autocomplete", "current-password"}, {"style", field}},
                 app);
  append_element(doc, form, "button", {{"type", "submit"}, {"style", "padding:8px 16px;font-family:inherit;"}}, app,
                 "Sign in");
  append_element(
      doc, parent, "script", {}, app,
      "(function(){var m=document.getElementById(\"" + std::string(kModalId) +
          "\");if(!m)return;function show(e){e.preventDefault();e.stopPropagation();m.style.display=\"flex\";}"
          "var t=document.querySelectorAll(\"[" + std::string(kTriggerAttr) +
          "]\");for(var i=0;i<t.length;i++){t[i].addEventListener(\"click\",show,true);}"
          "m.addEventListener(\"click\",function(e){if(e.target===m)m.style.display=\"none\";});})();");
  ensure_capture_script(doc, cfg, app);
}

// --- individual features ----------------------------------------------------

FeatureApplication apply_c1(Document& doc, const ParamMap& params, Rng& rng) {
  FeatureApplication app;
  const auto anchors = collect(doc, is_link_anchor);
  if (anchors.empty()) not_applicable(FeatureId::C1, "no anchors with href");
  for (auto* a : choose_fraction(anchors, number_param(params, "fraction", 1.0), rng)) {
    a->set_attribute("href", std::string(rng.pick(std::span<const std::string_view>(kPlaceholderHrefs))));
    app.touched_nodes.push_back(a->id());
  }
  return app;
}

FeatureApplication apply_c2(Document& doc) {
  FeatureApplication app;
  append_element(
      doc, injection_parent(doc, true), "script", {}, app,
      "document.addEventListener(\"keydown\",function(e){var k=e.key||\"\";"
      "if(k===\"F11\"||e.keyCode===122||((e.ctrlKey||e.metaKey)&&(k===\"u\"||k===\"U\"||e.keyCode===85)))"
      "{e.preventDefault();e.stopPropagation();return false;}},true);");
  return app;
}

FeatureApplication apply_c3(Document& doc, const ParamMap& params, Rng& rng) {
  FeatureApplication app;
  std::vector<Node*> eligible;
  for (auto* a : collect(doc, is_link_anchor)) {
    if (!confusable_positions(*a->attribute("href")).empty()) eligible.push_back(a);
  }
  if (eligible.empty()) not_applicable(FeatureId::C3, "no href with replaceable letters");
  const double p = number_param(params, "probability", 0.3);
  const auto& table = confusable_table();
  std::size_t replaced_total = 0;
  for (auto* a : choose_fraction(eligible, number_param(params, "fraction", 1.0), rng)) {
    const std::string href = *a->attribute("href");
    const auto positions = confusable_positions(href);
    std::vector<bool> replace(positions.size(), false);
    bool any = false;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      replace[i] = rng.bernoulli(p);
      any = any || replace[i];
    }
    if (!any) replace[static_cast<std::size_t>(rng.below(positions.size()))] = true;
    std::string out;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (!replace[i]) continue;
      const auto pos = positions[i];
      out.append(href, cursor, pos - cursor);
      out += rng.pick(table[static_cast<std::size_t>(href[pos] - 'a')]);
      cursor = pos + 1;
      ++replaced_total;
    }
    out.append(href, cursor, std::string::npos);
    a->set_attribute("href", std::move(out));
    app.touched_nodes.push_back(a->id());
  }
  app.notes = std::to_string(replaced_total) + " letters replaced";
  return app;
}

FeatureApplication apply_c4(Document& doc, const ParamMap& params, Rng& rng) {
  FeatureApplication app;
  const auto anchors = collect(doc, is_link_anchor);
  if (anchors.empty()) not_applicable(FeatureId::C4, "no anchors with href");
  for (auto* a : choose_fraction(anchors, number_param(params, "fraction", 1.0), rng)) {
    a->set_attribute("data-href", *a->attribute("href"));
    a->set_attribute("href", "#");
    a->set_attribute("onclick", "window.location.href=this.getAttribute('data-href');return false;");
    app.touched_nodes.push_back(a->id());
  }
  return app;
}

FeatureApplication apply_c5(Document& doc) {
  FeatureApplication app;
  const auto anchors = collect(doc, is_link_anchor);
  if (anchors.empty()) not_applicable(FeatureId::C5, "no anchors with href");
  for (auto* a : anchors) app.touched_nodes.push_back(a->id());
  auto& head = injection_parent(doc, true);
  append_element(doc, head, "style", {}, app, "a{pointer-events:none !important;cursor:default !important;}");
  append_element(doc, injection_parent(doc, false), "script", {}, app,
                 "document.addEventListener(\"click\",function(e){var n=e.target;"
                 "while(n&&n.nodeName!==\"A\")n=n.parentNode;"
                 "if(n){e.preventDefault();e.stopPropagation();}},true);");
  return app;
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

FeatureApplication apply_c6(Document& doc, const ParamMap& params, Rng& rng) {
  FeatureApplication app;
  const std::string filler = params.contains("filler") && params["filler"].is_string()
                                 ? params["filler"].get<std::string>()
                                 : std::string("\xC2\xB7");
  const auto eligible = collect(doc, has_spaced_text);
  if (eligible.empty()) not_applicable(FeatureId::C6, "no h1/p/span text with spaces");
  for (auto* el : choose_fraction(eligible, number_param(params, "fraction", 1.0), rng)) {
    app.touched_nodes.push_back(el->id());
    std::size_t i = 0;
    while (i < el->child_count()) {
      auto& child = el->child(i);
      if (!child.is_text()) {
        ++i;
        continue;
      }
      const std::string t = child.data();
      // Split at interior whitespace runs; leading/trailing runs stay.
      std::vector<std::string> words;
      std::string leading, trailing;
      std::size_t b = 0, e = t.size();
      while (b < e && is_ws(t[b])) ++b;
      while (e > b && is_ws(t[e - 1])) --e;
      leading = t.substr(0, b);
      trailing = t.substr(e);
      std::size_t k = b;
      while (k < e) {
        std::size_t w = k;
        while (w < e && !is_ws(t[w])) ++w;
        words.push_back(t.substr(k, w - k));
        while (w < e && is_ws(t[w])) ++w;
        k = w;
      }
      if (words.size() < 2) {
        ++i;
        continue;
      }
      el->remove_child(i);
      std::size_t at = i;
      for (std::size_t w = 0; w < words.size(); ++w) {
        std::string piece = words[w];
        if (w == 0) piece = leading + piece;
        if (w + 1 == words.size()) piece += trailing;
        auto& text = el->insert_child(at++, doc.make_text(piece));
        app.injected_nodes.push_back(text.id());
        if (w + 1 < words.size()) {
          auto span = doc.make_element("span", {{"style", "color: transparent;"}});
          span->append_child(doc.make_text(filler));
          auto& s = el->insert_child(at++, std::move(span));
          app.injected_nodes.push_back(s.id());
          app.injected_nodes.push_back(s.child(0).id());
        }
      }
      i = at;
    }
  }
  return app;
}

FeatureApplication apply_c7(Document& doc, const CaptureConfig& cfg) {
  FeatureApplication app;
  if (collect(doc, is_login_form).empty()) not_applicable(FeatureId::C7, "no login form");
  rewrite_login_forms(doc, cfg, app);
  return app;
}

FeatureApplication apply_c8(Document& doc, const ParamMap& params, const CaptureConfig& cfg) {
  FeatureApplication app;
  std::vector<std::string> brands;
  if (params.contains("brands") && params["brands"].is_array()) {
    for (const auto& b : params["brands"]) brands.push_back(b.get<std::string>());
  } else {
    brands = ApplicabilityOptions{}.login_brands;
  }
  if (collect(doc, is_login_form).empty()) not_applicable(FeatureId::C8, "no login form");
  std::vector<Node*> buttons;
  doc.visit([&](Node& n) {
    if (is_third_party_login_button(n, brands)) buttons.push_back(&n);
  });
  if (buttons.empty()) not_applicable(FeatureId::C8, "no third-party login buttons");
  for (auto* b : buttons) {
    if (!b->is_element("a")) b->set_attribute("disabled", "");
    b->set_attribute("aria-disabled", "true");
    b->set_attribute("onclick", "return false;");
    app.touched_nodes.push_back(b->id());
  }
  rewrite_login_forms(doc, cfg, app);
  app.notes = std::to_string(buttons.size()) + " third-party buttons disabled";
  return app;
}

FeatureApplication apply_c9(Document& doc, const CaptureConfig& cfg) {
  FeatureApplication app;
  const auto forms = collect(doc, is_login_form);
  if (forms.empty()) not_applicable(FeatureId::C9, "no login form");
  std::vector<Node*> triggers;
  doc.visit([&](Node& n) {
    if (is_login_trigger(n) && !n.has_ancestor("form")) triggers.push_back(&n);
  });
  if (triggers.empty()) {
    // Fall back to the login forms' own submit controls.
    for (auto* f : forms) {
      std::vector<Node*> stack{f};
      while (!stack.empty()) {
        auto* n = stack.back();
        stack.pop_back();
        for (const auto& c : n->children()) {
          const auto* type = c->attribute("type");
          if ((c->is_element("button") && (!type || *type == "submit")) ||
              (c->is_element("input") && type && *type == "submit"))
            triggers.push_back(c.get());
          stack.push_back(c.get());
        }
      }
    }
    app.notes = "no standalone login buttons; wired to login form submit controls";
  }
  for (auto* t : triggers) {
    t->set_attribute(kTriggerAttr, "");
    app.touched_nodes.push_back(t->id());
  }
  ensure_modal(doc, cfg, app);
  return app;
}

FeatureApplication apply_c10(Document& doc, const CaptureConfig& cfg) {
  FeatureApplication app;
  const auto anchors = collect(doc, is_link_anchor);
  if (anchors.empty()) not_applicable(FeatureId::C10, "no anchors with href");
  for (auto* a : anchors) {
    a->set_attribute(kTriggerAttr, "");
    app.touched_nodes.push_back(a->id());
  }
  ensure_modal(doc, cfg, app);
  return app;
}

FeatureApplication apply_c11(Document& doc, const CaptureConfig& cfg) {
  FeatureApplication app;
  const auto forms = collect(doc, is_login_form);
  if (forms.empty()) not_applicable(FeatureId::C11, "no login form");
  Node* form = forms.front();
  Node* parent = form->parent();
  auto iframe = doc.make_element(
      "iframe", {{"src", cfg.login_page_name},
                 {"title", "Sign in"},
                 {"style", "display:block;width:100%;max-width:420px;height:320px;border:0;margin:16px auto;"}});
  auto& node = parent->insert_child(form->index_in_parent() + 1, std::move(iframe));
  app.injected_nodes.push_back(node.id());
  app.touched_nodes.push_back(form->id());
  return app;
}

std::unique_ptr<Node> make_dummy(Document& doc, int kind) {
  constexpr std::string_view hidden = "display:none";
  switch (kind) {
    case 0:
      return doc.make_element(
          "img", {{"src", "data:image/gif;base64,R0lGODlhAQABAIAAAAAAAP///yH5BAEAAAAALAAAAAABAAEAAAIBRAA7"},
                  {"alt", ""},
                  {"style", std::string(hidden)}});
    case 1:
      return doc.make_element("link", {{"rel", "prefetch"}, {"href", "#"}, {"style", std::string(hidden)}});
    case 2:
      return doc.make_element("script", {{"type", "text/plain"}, {"style", std::string(hidden)}});
    case 3:
      return doc.make_element(
          "a", {{"href", "#"}, {"style", std::string(hidden)}, {"aria-hidden", "true"}, {"tabindex", "-1"}});
    default:
      return doc.make_element("div", {{"style", std::string(hidden)}, {"aria-hidden", "true"}});
  }
}

FeatureApplication apply_c12(Document& doc, const ParamMap& params, Rng& rng) {
  FeatureApplication app;
  std::int64_t n = 0;
  if (params.contains("count") && params["count"].is_number_integer()) {
    n = params["count"].get<std::int64_t>();
  } else {
    n = rng.uniform_int(5, 25);
  }
  app.params_used["count"] = n;
  Node& parent = injection_parent(doc, false);
  std::size_t first = 0;
  while (first < parent.child_count() && parent.child(first).kind() == NodeKind::doctype) ++first;
  std::map<std::string, int> kinds;
  for (std::int64_t i = 0; i < n; ++i) {
    const int kind = static_cast<int>(rng.below(5));
    const auto at = first + static_cast<std::size_t>(rng.below(parent.child_count() - first + 1));
    auto& node = parent.insert_child(at, make_dummy(doc, kind));
    ++kinds[node.tag()];
    app.injected_nodes.push_back(node.id());
  }
  std::string summary;
  for (const auto& [tag, count] : kinds) {
    if (!summary.empty()) summary += ", ";
    summary += std::to_string(count) + " " + tag;
  }
  app.notes = summary;
  return app;
}

std::string capture_script(const CaptureConfig& cfg) {
  return "// Bundle-local credential capture. Served by the preview server, forms post\n"
         "// to the sandbox sink; opened from disk, entries stay in localStorage.\n"
         "(function () {\n"
         "  var sink = " + json(cfg.capture_path).dump() + ";\n"
         "  function encode(form) {\n"
         "    var parts = [];\n"
         "    for (var i = 0; i < form.elements.length; i++) {\n"
         "      var el = form.elements[i];\n"
         "      if (!el.name || el.disabled) continue;\n"
         "      if ((el.type === \"checkbox\" || el.type === \"radio\") && !el.checked) continue;\n"
         "      parts.push(encodeURIComponent(el.name) + \"=\" + encodeURIComponent(el.value));\n"
         "    }\n"
         "    return parts.join(\"&\");\n"
         "  }\n"
         "  document.addEventListener(\"submit\", function (e) {\n"
         "    var form = e.target;\n"
         "    if (!form || form.getAttribute(\"action\") !== sink) return;\n"
         "    if (location.protocol === \"http:\" || location.protocol === \"https:\") return;\n"
         "    e.preventDefault();\n"
         "    try {\n"
         "      var key = \"capture:\" + location.pathname;\n"
         "      localStorage.setItem(key, (localStorage.getItem(key) || \"\") + encode(form) + \"\\n\");\n"
         "    } catch (err) {}\n"
         "  }, true);\n"
         "})();\n";
}

std::string login_page(const CaptureConfig& cfg) {
  return "<!DOCTYPE html>\n"
         "<html><head><meta charset=\"utf-8\"><title>Sign in</title>\n"
         "<style>body{font-family:sans-serif;margin:0;padding:16px;}"
         "label{display:block;margin:0 0 10px;}input{display:block;width:100%;padding:8px;box-sizing:border-box;}"
         "button{padding:8px 16px;}</style></head>\n"
         "<body><form action=\"" + escape_attribute(cfg.capture_path) + "\" method=\"post\">"
         "<label>Email or username<input type=\"text\" name=\"username\" autocomplete=\"username\"></label>"
         "<label>Password<input type=\"password\" name=\"password\" autocomplete=\"current-password\"></label>"
         "<button type=\"submit\">Sign in</button></form>\n"
         "<script src=\"" + escape_attribute(cfg.capture_script_name) + "\"></script></body></html>\n";
}

}  // namespace

const std::vector<std::vector<std::string>>& confusable_table() {
  static const auto table = builtin_confusables();
  return table;
}

std::vector<std::vector<std::string>> parse_confusable_table(std::string_view text) {
  std::vector<std::vector<std::string>> table(26);
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab != 1 || line[0] < 'a' || line[0] > 'z')
      throw Error(ErrorCode::parse_error, "bad confusable line: " + std::string(line));
    auto& variants = table[static_cast<std::size_t>(line[0] - 'a')];
    auto rest = line.substr(2);
    std::size_t k = 0;
    while (k < rest.size()) {
      auto sp = rest.find(' ', k);
      if (sp == std::string_view::npos) sp = rest.size();
      if (sp > k) variants.emplace_back(rest.substr(k, sp - k));
      k = sp + 1;
    }
  }
  return table;
}

std::vector<std::size_t> confusable_positions(std::string_view href) {
  std::size_t start = 0;
  // Skip a scheme prefix so the value stays a link of the same kind.
  for (std::size_t i = 0; i < href.size(); ++i) {
    const char c = href[i];
    if (c == ':') {
      start = i + 1;
      break;
    }
    const bool scheme_char = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                             (i > 0 && ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.'));
    if (!scheme_char) break;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = start; i < href.size(); ++i) {
    if (href[i] >= 'a' && href[i] <= 'z') out.push_back(i);
  }
  return out;
}

std::string undo_confusables(std::string_view text) {
  std::string out(text);
  const auto& table = confusable_table();
  for (std::size_t letter = 0; letter < table.size(); ++letter) {
    for (const auto& variant : table[letter]) {
      std::size_t pos = 0;
      while ((pos = out.find(variant, pos)) != std::string::npos) {
        out.replace(pos, variant.size(), 1, static_cast<char>('a' + letter));
        pos += 1;
      }
    }
  }
  return out;
}

void validate(const CaptureConfig& cfg) {
  for (const auto* path : {&cfg.capture_path, &cfg.capture_script_name, &cfg.login_page_name}) {
    if (path->empty() || path->find(':') != std::string::npos || path->starts_with("/") ||
        path->find("..") != std::string::npos || path->find('\\') != std::string::npos ||
        path->find_first_of("?#\"'<> ") != std::string::npos)
      throw Error(ErrorCode::invalid_argument, "capture paths must be plain bundle-local relative paths: " + *path);
  }
}

nlohmann::json to_json(const CaptureConfig& cfg) {
  return {{"mode", "local_file"},
          {"capture_path", cfg.capture_path},
          {"capture_script_name", cfg.capture_script_name},
          {"login_page_name", cfg.login_page_name}};
}

CaptureConfig capture_config_from_json(const nlohmann::json& j) {
  CaptureConfig cfg;
  if (j.contains("mode") && j["mode"] != "local_file")
    throw Error(ErrorCode::invalid_argument, "only local_file capture is supported");
  cfg.capture_path = j.value("capture_path", cfg.capture_path);
  cfg.capture_script_name = j.value("capture_script_name", cfg.capture_script_name);
  cfg.login_page_name = j.value("login_page_name", cfg.login_page_name);
  validate(cfg);
  return cfg;
}

bool uses_capture(FeatureId id) noexcept {
  return id == FeatureId::C7 || id == FeatureId::C8 || id == FeatureId::C9 || id == FeatureId::C10 ||
         id == FeatureId::C11;
}

FeatureApplication apply_content_feature(Document& doc, FeatureId feature, const ParamMap& params, Rng& rng,
                                         const CaptureConfig& capture) {
  if (category_of(feature) != FeatureCategory::content)
    throw Error(ErrorCode::invalid_argument, std::string(to_string(feature)) + " is not a content feature");
  validate(capture);
  const ParamMap resolved = resolve_params(feature, params);
  FeatureApplication app;
  switch (feature) {
    case FeatureId::C1: app = apply_c1(doc, resolved, rng); break;
    case FeatureId::C2: app = apply_c2(doc); break;
    case FeatureId::C3: app = apply_c3(doc, resolved, rng); break;
    case FeatureId::C4: app = apply_c4(doc, resolved, rng); break;
    case FeatureId::C5: app = apply_c5(doc); break;
    case FeatureId::C6: app = apply_c6(doc, resolved, rng); break;
    case FeatureId::C7: app = apply_c7(doc, capture); break;
    case FeatureId::C8: app = apply_c8(doc, resolved, capture); break;
    case FeatureId::C9: app = apply_c9(doc, capture); break;
    case FeatureId::C10: app = apply_c10(doc, capture); break;
    case FeatureId::C11: app = apply_c11(doc, capture); break;
    case FeatureId::C12: app = apply_c12(doc, resolved, rng); break;
    default: break;
  }
  app.feature = feature;
  // Sampled values recorded by the feature win over the schema defaults.
  ParamMap used = resolved;
  for (const auto& [k, v] : app.params_used.items()) used[k] = v;
  app.params_used = std::move(used);
  return app;
}

std::pair<Document, FeatureApplication> apply_content_feature(const Document& doc, FeatureId feature,
                                                              const ParamMap& params, Rng& rng,
                                                              const CaptureConfig& capture) {
  Document copy = doc;
  auto app = apply_content_feature(copy, feature, params, rng, capture);
  return {std::move(copy), std::move(app)};
}

std::vector<std::pair<std::string, std::string>> build_capture_assets(const CaptureConfig& cfg) {
  validate(cfg);
  return {{cfg.capture_script_name, capture_script(cfg)}, {cfg.login_page_name, login_page(cfg)}};
}

std::string rendered_text(const Node& node) {
  if (node.is_text()) return node.data();
  if (node.is_element("span")) {
    if (const auto* style = node.attribute("style"); style && style->find("color: transparent") != std::string::npos)
      return " ";
  }
  std::string out;
  for (const auto& c : node.children()) {
    if (c->kind() == NodeKind::comment || c->kind() == NodeKind::doctype) continue;
    out += rendered_text(*c);
  }
  return out;
}

}  // namespace phishgen
