// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "phishgen/applicability.hpp"
#include "phishgen/content_features.hpp"
#include "phishgen/error.hpp"

using namespace phishgen;
using json = nlohmann::json;

namespace {

const char* kPage = R"(<!DOCTYPE html><html><head><title>t</title></head><body>
<nav><a href="/about">About us</a><a href="https://example.com/help">Help</a><a name="x">no href</a></nav>
<h1>Welcome  to the site</h1>
<form action="/login"><input name="u"><input type="password" name="p"><button type="submit">Log in</button></form>
<button>Sign in with Google</button><a href="/register">Register</a>
<p>plain</p></body></html>)";

struct Applied {
  Document before;
  Document after;
  FeatureApplication app;
};

Applied apply(FeatureId id, const json& params = json::object(), std::uint64_t seed = 1, const char* markup = kPage) {
  Applied out{parse_document(markup), {}, {}};
  out.after = out.before;
  Rng rng(seed);
  out.app = apply_content_feature(out.after, id, params, rng);
  return out;
}

std::size_t element_count(const Document& doc) { return doc.element_count(); }

}  // namespace

TEST(ContentFeatures, C1HrefsComeFromPlaceholderSet) {
  const auto r = apply(FeatureId::C1);
  ASSERT_EQ(r.app.touched_nodes.size(), 3u);  // every anchor with an href
  for (auto id : r.app.touched_nodes) {
    const auto* href = r.after.find(id)->attribute("href");
    ASSERT_NE(href, nullptr);
    EXPECT_NE(std::find(kPlaceholderHrefs.begin(), kPlaceholderHrefs.end(), *href), kPlaceholderHrefs.end());
  }
}

TEST(ContentFeatures, C1FractionKeepsAtLeastOne) {
  const auto r = apply(FeatureId::C1, {{"fraction", 0.01}});
  EXPECT_EQ(r.app.touched_nodes.size(), 1u);
}

TEST(ContentFeatures, C2AddsKeyHandlerScript) {
  const auto r = apply(FeatureId::C2);
  ASSERT_EQ(r.app.injected_nodes.size(), 2u);  // script + its text
  const auto* script = r.after.find(r.app.injected_nodes[0]);
  ASSERT_TRUE(script->is_element("script"));
  const auto code = text_content(*script);
  EXPECT_NE(code.find("F11"), std::string::npos);
  EXPECT_NE(code.find("keydown"), std::string::npos);
}

TEST(ContentFeatures, C3IsInvertible) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto r = apply(FeatureId::C3, {{"probability", 0.5}}, seed);
    ASSERT_FALSE(r.app.touched_nodes.empty());
    for (auto id : r.app.touched_nodes) {
      const auto& now = *r.after.find(id)->attribute("href");
      const auto& was = *r.before.find(id)->attribute("href");
      EXPECT_NE(now, was);
      EXPECT_EQ(undo_confusables(now), was);
    }
  }
}

TEST(ContentFeatures, C3NeedsReplaceableLetter) {
  EXPECT_THROW(apply(FeatureId::C3, json::object(), 1, "<a href=\"#1\">x</a>"), Error);
}

TEST(ContentFeatures, C4MovesTargetToDataAttribute) {
  const auto r = apply(FeatureId::C4);
  for (auto id : r.app.touched_nodes) {
    const auto* a = r.after.find(id);
    EXPECT_EQ(*a->attribute("href"), "#");
    EXPECT_EQ(*a->attribute("data-href"), *r.before.find(id)->attribute("href"));
    EXPECT_TRUE(a->has_attribute("onclick"));
  }
}

TEST(ContentFeatures, C5InjectsPointerBlock) {
  const auto r = apply(FeatureId::C5);
  const auto html = serialize_document(r.after);
  EXPECT_NE(html.find("pointer-events:none"), std::string::npos);
}

TEST(ContentFeatures, C6KeepsRenderedWordsAndHidesFiller) {
  const auto r = apply(FeatureId::C6);
  const auto* h1 = r.after.first_element("h1");
  EXPECT_EQ(rendered_text(*h1), "Welcome to the site");
  const auto spans = r.after.elements("span");
  ASSERT_EQ(spans.size(), 3u);  // one per gap; the double space is one gap
  for (const auto* s : spans) EXPECT_NE(s->attribute("style")->find("transparent"), std::string::npos);
}

TEST(ContentFeatures, C7RewritesLoginForms) {
  CaptureConfig cfg;
  const auto r = apply(FeatureId::C7);
  const auto* form = r.after.first_element("form");
  EXPECT_EQ(*form->attribute("action"), cfg.capture_path);
  EXPECT_EQ(*form->attribute("method"), "post");
  bool script = false;
  for (const auto* s : r.after.elements("script")) script |= s->attribute("src") && *s->attribute("src") == "capture.js";
  EXPECT_TRUE(script);
}

TEST(ContentFeatures, C8DisablesBrandButtons) {
  const auto r = apply(FeatureId::C8);
  bool disabled = false;
  for (const auto* b : r.after.elements("button")) {
    if (text_content(*b).find("Google") != std::string::npos) disabled = b->has_attribute("disabled");
  }
  EXPECT_TRUE(disabled);
  EXPECT_EQ(*r.after.first_element("form")->attribute("action"), "capture");
}

TEST(ContentFeatures, C8RequiresBrandButton) {
  EXPECT_THROW(apply(FeatureId::C8, json::object(), 1, "<form><input type=password></form>"), Error);
}

TEST(ContentFeatures, C9WiresTriggersToModal) {
  const auto r = apply(FeatureId::C9);
  bool found = false;
  for (const auto* d : r.after.elements("div")) found |= d->attribute("id") && *d->attribute("id") == "login-overlay";
  EXPECT_TRUE(found);
  std::size_t triggers = 0;
  r.after.visit([&](const Node& n) { triggers += n.has_attribute("data-login-trigger"); });
  EXPECT_GE(triggers, 1u);
}

TEST(ContentFeatures, C10ModalInjectedOnce) {
  Document doc = parse_document(kPage);
  Rng rng(3);
  apply_content_feature(doc, FeatureId::C9, json::object(), rng);
  apply_content_feature(doc, FeatureId::C10, json::object(), rng);
  int overlays = 0;
  for (const auto* d : doc.elements("div")) overlays += d->attribute("id") && *d->attribute("id") == "login-overlay";
  EXPECT_EQ(overlays, 1);
}

TEST(ContentFeatures, C11IframeFollowsForm) {
  const auto r = apply(FeatureId::C11);
  const auto* form = r.after.first_element("form");
  const auto& next = form->parent()->child(form->index_in_parent() + 1);
  ASSERT_TRUE(next.is_element("iframe"));
  EXPECT_EQ(*next.attribute("src"), "login.html");
}

TEST(ContentFeatures, C12AddsExactlyCountElements) {
  for (int n : {1, 5, 17, 40}) {
    const auto r = apply(FeatureId::C12, {{"count", n}});
    EXPECT_EQ(element_count(r.after) - element_count(r.before), static_cast<std::size_t>(n));
    EXPECT_EQ(r.app.params_used["count"], n);
  }
}

TEST(ContentFeatures, C12SampledCountIsRecorded) {
  const auto r = apply(FeatureId::C12);
  const auto n = r.app.params_used["count"].get<int>();
  EXPECT_GE(n, 5);
  EXPECT_LE(n, 25);
  EXPECT_EQ(element_count(r.after) - element_count(r.before), static_cast<std::size_t>(n));
}

TEST(ContentFeatures, EveryFeatureIsLedgerComplete) {
  for (auto id : kAllFeatures) {
    if (category_of(id) != FeatureCategory::content) continue;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto r = apply(id, json::object(), seed);
      EXPECT_FALSE(r.app.touched_nodes.empty() && r.app.injected_nodes.empty()) << to_string(id);
      for (auto n : r.app.injected_nodes) EXPECT_NE(r.after.find(n), nullptr) << to_string(id);
      EXPECT_TRUE(fixtures::unledgered_changes(r.before, r.after, {r.app}).empty()) << to_string(id);
    }
  }
}

TEST(ContentFeatures, SameSeedSameResult) {
  for (auto id : kAllFeatures) {
    if (category_of(id) != FeatureCategory::content) continue;
    const auto a = apply(id, json::object(), 99);
    const auto b = apply(id, json::object(), 99);
    EXPECT_EQ(serialize_document(a.after), serialize_document(b.after)) << to_string(id);
    EXPECT_EQ(a.app, b.app) << to_string(id);
  }
}

TEST(ContentFeatures, NothingPointsOffHost) {
  CaptureConfig cfg;
  for (auto id : {FeatureId::C7, FeatureId::C8, FeatureId::C9, FeatureId::C10, FeatureId::C11}) {
    const auto r = apply(id);
    // C7/C8 rewrite the page's own forms; the others only inject new ones.
    const bool rewrites = id == FeatureId::C7 || id == FeatureId::C8;
    std::size_t checked = 0;
    for (const auto* f : r.after.elements("form")) {
      if (!rewrites && r.before.find(f->id())) continue;
      const auto* action = f->attribute("action");
      ASSERT_NE(action, nullptr);
      EXPECT_EQ(*action, cfg.capture_path) << to_string(id);
      ++checked;
    }
    if (id != FeatureId::C11) EXPECT_GE(checked, 1u) << to_string(id);
  }
  for (const auto& [path, bytes] : build_capture_assets(cfg)) {
    EXPECT_EQ(bytes.find("http://"), std::string::npos) << path;
    EXPECT_EQ(bytes.find("https://"), std::string::npos) << path;
  }
}

TEST(ContentFeatures, InapplicableFeaturesThrow) {
  const char* empty = "<html><body><p>x</p></body></html>";
  for (auto id : {FeatureId::C1, FeatureId::C3, FeatureId::C4, FeatureId::C5, FeatureId::C6, FeatureId::C7,
                  FeatureId::C8, FeatureId::C9, FeatureId::C10, FeatureId::C11}) {
    try {
      apply(id, json::object(), 1, empty);
      ADD_FAILURE() << to_string(id);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::feature_not_applicable) << to_string(id);
    }
  }
}

TEST(ContentFeatures, BadParamsRejected) {
  EXPECT_THROW(apply(FeatureId::C3, {{"probability", 2}}), Error);
  EXPECT_THROW(apply(FeatureId::C12, {{"count", 0}}), Error);
  EXPECT_THROW(apply(FeatureId::C1, {{"nope", 1}}), Error);
}

TEST(ContentFeatures, ConfusableTableMatchesDataFile) {
  std::ifstream in(std::string(PHISHGEN_DATA_DIR) + "/confusables.tsv");
  ASSERT_TRUE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(parse_confusable_table(ss.str()), confusable_table());
}
