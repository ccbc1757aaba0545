// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are pinned below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "applicability_cases.hpp"
#include "fixtures.hpp"
#include "phishgen/content_features.hpp"
#include "phishgen/error.hpp"
#include "phishgen/image.hpp"
#include "phishgen/metrics.hpp"
#include "phishgen/pipeline.hpp"
#include "phishgen/service.hpp"
#include "phishgen/visual_features.hpp"

using namespace phishgen;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kMetricsTolerance = 1e-12;
constexpr int kBlurTolerance = 1;  // per channel
constexpr double kLogoAlphaMin = 0.10;
constexpr double kLogoAlphaMax = 0.35;
constexpr double kPageOpacityMin = 0.70;
constexpr double kPageOpacityMax = 0.95;
constexpr int kCorpusSize = 100;
constexpr int kLogoFixtures = 10;
constexpr int kSpoofSamples = 200;

// Collects problems for one criterion; empty means pass.
struct Problems {
  std::vector<std::string> items;
  void check(bool ok, const std::string& what) {
    if (!ok) items.push_back(what);
  }
};

const char* kPage = R"(<!DOCTYPE html><html><head><title>t</title></head><body>
<nav><a href="/about">About us</a><a href="https://example.com/help">Help</a></nav>
<h1>Welcome  to the site</h1>
<form action="/login"><input name="u"><input type="password" name="p"><button type="submit">Log in</button></form>
<button>Sign in with Google</button><a href="/register">Register</a>
<p>plain</p></body></html>)";

struct Applied {
  Document before;
  Document after;
  FeatureApplication app;
};

Applied apply_content(FeatureId id, const json& params = json::object(), std::uint64_t seed = 1) {
  Applied out{parse_document(kPage), {}, {}};
  out.after = out.before;
  Rng rng(seed);
  out.app = apply_content_feature(out.after, id, params, rng);
  return out;
}

struct VisualRun {
  Document doc;
  AssetMap assets;
  FeatureApplication app;
};

VisualRun apply_visual(const WebpageSnapshot& s, FeatureId id, const json& params = json::object(),
                       std::uint64_t seed = 3) {
  VisualRun r{parse_document(s.markup), s.assets, {}};
  Rng rng(seed);
  r.app = apply_visual_feature(r.doc, r.assets, id, params, rng, {seed, "examp1e.com"});
  return r;
}

bool has_overlay_form_to_capture(const Document& doc) {
  for (const auto* f : doc.elements("form")) {
    const auto* action = f->attribute("action");
    if (action && *action == CaptureConfig{}.capture_path) {
      for (const Node* p = f->parent(); p; p = p->parent()) {
        const auto* id = p->attribute("id");
        if (id && *id == "login-overlay") return true;
      }
    }
  }
  return false;
}

// Each returns true when the feature's postcondition holds.
std::vector<std::pair<FeatureId, std::function<bool()>>> feature_checks() {
  const auto logo_page = fixtures::login_page();
  const auto logo_src = [](const Document& d) { return *d.first_element("img")->attribute("src"); };
  return {
      {FeatureId::C1,
       [] {
         const auto r = apply_content(FeatureId::C1);
         if (r.app.touched_nodes.size() != 3) return false;
         return std::all_of(r.app.touched_nodes.begin(), r.app.touched_nodes.end(), [&](NodeId id) {
           const auto& href = *r.after.find(id)->attribute("href");
           return std::find(kPlaceholderHrefs.begin(), kPlaceholderHrefs.end(), href) != kPlaceholderHrefs.end();
         });
       }},
      {FeatureId::C2,
       [] {
         const auto r = apply_content(FeatureId::C2);
         const auto* s = r.after.find(r.app.injected_nodes.at(0));
         return s->is_element("script") && text_content(*s).find("keydown") != std::string::npos;
       }},
      {FeatureId::C3,
       [] {
         for (std::uint64_t seed = 1; seed <= 20; ++seed) {
           const auto r = apply_content(FeatureId::C3, {{"probability", 0.5}}, seed);
           if (r.app.touched_nodes.empty()) return false;
           for (auto id : r.app.touched_nodes) {
             const auto& now = *r.after.find(id)->attribute("href");
             const auto& was = *r.before.find(id)->attribute("href");
             if (now == was || undo_confusables(now) != was) return false;
           }
         }
         return true;
       }},
      {FeatureId::C4,
       [] {
         const auto r = apply_content(FeatureId::C4);
         for (auto id : r.app.touched_nodes) {
           const auto* a = r.after.find(id);
           if (*a->attribute("href") != "#" || *a->attribute("data-href") != *r.before.find(id)->attribute("href"))
             return false;
         }
         return !r.app.touched_nodes.empty();
       }},
      {FeatureId::C5,
       [] { return serialize_document(apply_content(FeatureId::C5).after).find("pointer-events:none") != std::string::npos; }},
      {FeatureId::C6,
       [] {
         const auto r = apply_content(FeatureId::C6);
         return rendered_text(*r.after.first_element("h1")) == "Welcome to the site" &&
                serialize_document(r.after) != serialize_document(r.before);
       }},
      {FeatureId::C7,
       [] {
         const auto r = apply_content(FeatureId::C7);
         const auto* form = r.after.first_element("form");
         return *form->attribute("action") == CaptureConfig{}.capture_path && *form->attribute("method") == "post";
       }},
      {FeatureId::C8,
       [] {
         const auto r = apply_content(FeatureId::C8);
         for (const auto* b : r.after.elements("button")) {
           if (text_content(*b).find("Google") != std::string::npos) return b->has_attribute("disabled");
         }
         return false;
       }},
      {FeatureId::C9, [] { return has_overlay_form_to_capture(apply_content(FeatureId::C9).after); }},
      {FeatureId::C10, [] { return has_overlay_form_to_capture(apply_content(FeatureId::C10).after); }},
      {FeatureId::C11,
       [] {
         const auto r = apply_content(FeatureId::C11);
         const auto* iframe = r.after.first_element("iframe");
         if (!iframe || *iframe->attribute("src") != CaptureConfig{}.login_page_name) return false;
         for (const auto& [path, bytes] : build_capture_assets({})) {
           if (path == CaptureConfig{}.login_page_name) {
             const auto page = parse_document(bytes);
             return *page.first_element("form")->attribute("action") == CaptureConfig{}.capture_path;
           }
         }
         return false;
       }},
      {FeatureId::C12,
       [] {
         const auto r = apply_content(FeatureId::C12, {{"count", 10}});
         return r.after.element_count() - r.before.element_count() == 10;
       }},
      {FeatureId::V1,
       [logo_page] {
         for (std::uint64_t seed = 1; seed <= 20; ++seed) {
           const auto o = apply_visual(logo_page, FeatureId::V1, json::object(), seed).app.params_used["opacity"].get<double>();
           if (o < kPageOpacityMin || o > kPageOpacityMax) return false;
         }
         return true;
       }},
      {FeatureId::V2,
       [logo_page] {
         const auto r = apply_visual(logo_page, FeatureId::V2, {{"fonts", {"Papyrus"}}});
         return serialize_document(r.doc).find("font-family: Papyrus") != std::string::npos;
       }},
      {FeatureId::V3,
       [logo_page, logo_src] {
         const auto before = decode_png(logo_page.assets.at("assets/logo.png").bytes);
         for (std::uint64_t seed = 1; seed <= 20; ++seed) {
           const auto r = apply_visual(logo_page, FeatureId::V3, json::object(), seed);
           const double a = r.app.params_used["opacity"].get<double>();
           if (a < kLogoAlphaMin || a > kLogoAlphaMax) return false;
           const auto after = decode_png(r.assets.at(logo_src(r.doc)).bytes);
           if (after.rgba.size() != before.rgba.size()) return false;
           for (std::size_t i = 3; i < before.rgba.size(); i += 4) {
             if (after.rgba[i] != std::lround(before.rgba[i] * a)) return false;
           }
         }
         return true;
       }},
      {FeatureId::V4,
       [logo_page, logo_src] {
         const auto r = apply_visual(logo_page, FeatureId::V4, {{"text", "TEST"}});
         return r.app.params_used["text"] == "TEST" &&
                decode_png(r.assets.at(logo_src(r.doc)).bytes) != decode_png(logo_page.assets.at("assets/logo.png").bytes);
       }},
      {FeatureId::V5,
       [logo_page, logo_src] {
         const auto before = decode_png(logo_page.assets.at("assets/logo.png").bytes);
         const auto turned = apply_visual(logo_page, FeatureId::V5, {{"kind", "rotate"}, {"angle", 90}});
         const auto t = decode_png(turned.assets.at(logo_src(turned.doc)).bytes);
         if (t.width != before.height || t.height != before.width) return false;
         const auto blurred = apply_visual(logo_page, FeatureId::V5, {{"kind", "gaussian_blur"}, {"sigma", 0.01}});
         const auto b = decode_png(blurred.assets.at(logo_src(blurred.doc)).bytes);
         if (b.rgba.size() != before.rgba.size()) return false;
         for (std::size_t i = 0; i < b.rgba.size(); ++i) {
           if (std::abs(b.rgba[i] - before.rgba[i]) > kBlurTolerance) return false;
         }
         return true;
       }},
  };
}

void catalog(Problems& p) {
  const auto& cat = feature_catalog();
  p.check(cat.size() == 17, fmt::format("{} catalog entries", cat.size()));
  std::vector<std::string> want;
  for (int i = 1; i <= 12; ++i) want.push_back(fmt::format("C{}", i));
  for (int i = 1; i <= 5; ++i) want.push_back(fmt::format("V{}", i));
  const auto listed = catalog_to_json(std::nullopt)["features"];
  p.check(listed.size() == want.size(), "listing size");
  for (std::size_t i = 0; i < std::min(listed.size(), want.size()); ++i) {
    const bool content = i < 12;
    p.check(listed[i]["id"] == want[i], "id " + want[i]);
    p.check(listed[i]["category"] == (content ? "content" : "visual"), "category of " + want[i]);
  }
  p.check(catalog_to_json(FeatureCategory::content)["features"].size() == 12, "content count");
  p.check(catalog_to_json(FeatureCategory::visual)["features"].size() == 5, "visual count");
}

void per_feature(Problems& p) {
  const auto checks = feature_checks();
  p.check(checks.size() == 17, "fixture count");
  for (const auto& [id, fn] : checks) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      p.check(false, fmt::format("{} threw: {}", to_string(id), e.what()));
      continue;
    }
    p.check(ok, std::string(to_string(id)));
  }
}

void applicability(Problems& p) {
  const auto& cases = fixtures::applicability_cases();
  p.check(cases.size() == 20, "case count");
  for (const auto& c : cases) p.check(fixtures::analyze_case(c) == c.expected, c.name);
}

std::vector<BatchInput> corpus_inputs(const std::vector<fs::path>& pages) {
  std::vector<BatchInput> inputs;
  for (const auto& page : pages) inputs.push_back({page.string(), std::nullopt});
  return inputs;
}

void determinism(Problems& p) {
  GenerationRecipe recipe;
  recipe.seed = 7;
  const auto root = fixtures::temp_dir("accept-determinism");
  const auto page = fixtures::login_page();
  write_bundle(generate(page, recipe), root / "one");
  write_bundle(generate(page, recipe), root / "two");
  p.check(fixtures::read_tree(root / "one") == fixtures::read_tree(root / "two"), "single bundle differs");

  const auto inputs = corpus_inputs(fixtures::write_corpus(root / "pages", 12));
  auto shuffled = inputs;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(7));
  batch_generate(inputs, recipe, root / "batch-a", {}, 1);
  batch_generate(inputs, recipe, root / "batch-b", {}, 3);
  batch_generate(shuffled, recipe, root / "batch-c", {}, 2);
  const auto a = fixtures::read_tree(root / "batch-a");
  p.check(a.contains("manifest.json"), "manifest missing");
  p.check(a == fixtures::read_tree(root / "batch-b"), "repeat batch differs");
  p.check(a == fixtures::read_tree(root / "batch-c"), "shuffled batch differs");
  fs::remove_all(root);
}

void corpus(Problems& p) {
  const auto root = fixtures::temp_dir("accept-corpus");
  const auto pages = fixtures::write_corpus(root / "pages", kCorpusSize);
  GenerationRecipe recipe;
  recipe.seed = 7;
  const auto manifest = batch_generate(corpus_inputs(pages), recipe, root / "out");
  const auto j = json::parse(std::ifstream(root / "out" / "manifest.json"));
  p.check(manifest.entries.size() == kCorpusSize, fmt::format("{} ok entries", manifest.entries.size()));
  p.check(manifest.failures.empty(), fmt::format("{} failures", manifest.failures.size()));
  p.check(j["totals"]["inputs"] == kCorpusSize && j["totals"]["legitimate"] == kCorpusSize &&
              j["totals"]["generated"] == kCorpusSize,
          "totals not balanced");
  std::size_t ok = 0;
  for (const auto& e : j["entries"]) ok += e["status"] == "ok";
  p.check(ok == kCorpusSize, "status fields");
  for (const auto& e : manifest.entries) {
    const auto ledger = json::parse(std::ifstream(root / "out" / e.id / "ledger.json"));
    p.check(!ledger["applied"].empty(), "empty ledger for " + e.source_url);
  }

  // Logo variants.
  const std::vector<LogoTransform> kinds = {LogoTransform::opacity, LogoTransform::watermark, LogoTransform::rotate,
                                            LogoTransform::blur, LogoTransform::noise};
  std::size_t bundles = 0;
  int fixtures_used = 0;
  for (int i = 0; i < kCorpusSize && fixtures_used < kLogoFixtures; ++i) {
    if (i % 3 == 2) continue;  // corpus pages without a logo
    ++fixtures_used;
    const auto snapshot = load_input({pages[i].string(), std::nullopt}, {});
    GenerationRecipe base;
    base.seed = 100 + i;
    const auto variants = generate_logo_variants(snapshot, base, kinds);
    bundles += variants.size();
    std::set<std::string> visual;
    for (const auto& v : variants) {
      p.check(v.ledger.size() == variants[0].ledger.size(), "variant ledger length");
      if (v.ledger.size() != variants[0].ledger.size()) continue;
      for (std::size_t k = 0; k + 1 < v.ledger.size(); ++k) {
        p.check(v.ledger[k] == variants[0].ledger[k], "shared entry differs on page " + std::to_string(i));
      }
      p.check(category_of(v.ledger.back().feature) == FeatureCategory::visual, "last entry not visual");
      visual.insert(v.ledger.back().params_used.dump());
    }
    p.check(visual.size() == kinds.size(), "visual entries not distinct on page " + std::to_string(i));
  }
  p.check(bundles == kinds.size() * kLogoFixtures, fmt::format("{} variant bundles", bundles));
  fs::remove_all(root);
}

void spoofer(Problems& p) {
  const auto rules = default_spoof_rules();
  for (const char* domain : {"ml.com", "fb.com", "go.org", "www.ok.net", "x.io"}) {
    // Brute force: every single rule application.
    const auto parts = split_domain(domain);
    std::set<std::string> oracle;
    for (const auto& [key, reps] : rules.homoglyphs) {
      for (auto pos = parts.label.find(key); pos != std::string::npos; pos = parts.label.find(key, pos + 1)) {
        for (const auto& r : reps) {
          auto label = parts.label;
          label.replace(pos, key.size(), r);
          oracle.insert(parts.subdomains + label + "." + parts.suffix);
        }
      }
    }
    for (const auto& pre : rules.prefixes) oracle.insert(parts.subdomains + pre + parts.label + "." + parts.suffix);
    for (const auto& suf : rules.suffixes) oracle.insert(parts.subdomains + parts.label + suf + "." + parts.suffix);
    for (const auto& tld : rules.tld_swaps) {
      if (tld != parts.suffix) oracle.insert(parts.subdomains + parts.label + "." + tld);
    }
    for (std::uint64_t seed = 0; seed < kSpoofSamples; ++seed) {
      Rng rng(seed);
      const auto r = spoof_domain(domain, rules, rng, 1, 1);
      p.check(oracle.contains(r.spoofed_domain), fmt::format("{} -> {} outside 1-edit set", domain, r.spoofed_domain));
      p.check(replay_edits(domain, r.edits) == r.spoofed_domain, fmt::format("{} replay", domain));
      p.check(r.spoofed_domain != domain, fmt::format("{} unchanged", domain));
    }
  }
  bool reachable = false;
  for (std::uint64_t seed = 0; seed < 100000 && !reachable; ++seed) {
    Rng rng(seed);
    reachable = spoof_domain("facebook.com", rules, rng).spoofed_domain == "facebock-login.co";
  }
  p.check(reachable, "facebock-login.co not reachable");
}

void metrics(Problems& p) {
  std::mt19937_64 gen(99);
  for (int i = 0; i < 10; ++i) {
    const ConfusionCounts c{gen() % 500 + 1, gen() % 500 + 1, gen() % 500, gen() % 500 + 1};
    const auto r = score(c);
    // Exact rationals reduced by gcd, converted once.
    const auto ratio = [](std::uint64_t n, std::uint64_t d) {
      const auto g = std::gcd(n, d);
      return static_cast<double>(static_cast<long double>(n / g) / static_cast<long double>(d / g));
    };
    p.check(std::abs(r.accuracy - ratio(c.tp + c.tn, c.total())) <= kMetricsTolerance, "accuracy");
    p.check(std::abs(*r.precision - ratio(c.tp, c.tp + c.fp)) <= kMetricsTolerance, "precision");
    p.check(std::abs(*r.recall - ratio(c.tp, c.tp + c.fn)) <= kMetricsTolerance, "recall");
    p.check(std::abs(*r.f1 - ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn)) <= kMetricsTolerance, "f1");
  }
  const auto perfect = score({10, 0, 10, 0});
  p.check(perfect.accuracy == 1 && *perfect.precision == 1 && *perfect.recall == 1 && *perfect.f1 == 1, "perfect");
  const auto none = score({0, 0, 5, 5});
  p.check(!none.precision && *none.recall == 0 && !none.f1 && none.accuracy == 0.5, "no positive predictions");
  const auto negatives = score({0, 0, 4, 0});
  p.check(!negatives.precision && !negatives.recall && negatives.accuracy == 1, "no positives at all");
  bool threw = false;
  try {
    score({});
  } catch (const Error&) {
    threw = true;
  }
  p.check(threw, "zero total accepted");
}

void service(Problems& p) {
  fixtures::FixtureServer site;
  auto page = fixtures::login_page();
  const auto pos = page.markup.find("assets/logo.png");
  site.add("/login", page.markup.replace(pos, 15, "logo.png"), "text/html");
  site.add("/logo.png", fixtures::login_page().assets.at("assets/logo.png").bytes, "image/png");

  const auto sandbox = fixtures::temp_dir("accept-service");
  ServiceConfig cfg;
  p.check(is_loopback_host(cfg.host), "default host " + cfg.host);
  cfg.port = 0;
  cfg.sandbox_dir = sandbox;
  Service svc(cfg);
  const int port = svc.start();

  const auto analyzed = fixtures::http_post(port, "/analyze", json{{"url", site.url("/login")}}.dump());
  p.check(analyzed.status == 200, fmt::format("analyze {}", analyzed.status));
  if (analyzed.status == 200) {
    const auto sid = json::parse(analyzed.body)["session_id"].get<std::string>();
    const auto gen = fixtures::http_post(
        port, "/generate", json{{"session_id", sid}, {"features", {"C7", "V1"}}, {"seed", 7}}.dump());
    p.check(gen.status == 200, fmt::format("generate {}", gen.status));
    if (gen.status == 200) {
      const auto g = json::parse(gen.body);
      const auto preview = g["preview_url"].get<std::string>();
      const auto index = fixtures::http_get(port, preview);
      p.check(index.status == 200 && index.body.find("action=\"capture\"") != std::string::npos, "preview");
      const auto cap = fixtures::http_post(port, preview + "capture", "u=a&p=b", "application/x-www-form-urlencoded");
      p.check(cap.status == 204, fmt::format("capture {}", cap.status));
      p.check(!cap.headers.contains("Set-Cookie"), "capture set a cookie");
      std::ifstream log(sandbox / sid / "captures" / (g["bundle_id"].get<std::string>() + ".log"));
      std::string line, extra;
      p.check(std::getline(log, line) && line.find("u=a") != std::string::npos && line.find("p=b") != std::string::npos,
              "capture file line");
      p.check(!std::getline(log, extra), "capture file has extra lines");
    }
    const auto conflict =
        fixtures::http_post(port, "/generate", json{{"session_id", sid}, {"features", {"C5", "C10"}}}.dump());
    p.check(conflict.status == 409, fmt::format("C5+C10 gave {}", conflict.status));
  }
  svc.stop();

  ServiceConfig remote;
  remote.sandbox_dir = sandbox;
  remote.host = "0.0.0.0";
  bool refused = false;
  try {
    Service s(remote);
  } catch (const Error&) {
    refused = true;
  }
  p.check(refused, "non-loopback bind accepted without allow_remote");
  fs::remove_all(sandbox);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Problems&)>>> criteria = {
      {"feature catalog lists 12 content + 5 visual features", catalog},
      {"per-feature fixtures satisfy postconditions (17)", per_feature},
      {"applicability matches 20 labelled fixtures", applicability},
      {"seed 7 bundles and manifest are byte-identical across runs and order", determinism},
      {"100-page corpus balanced; 10 logo pages x 5 kinds differ only in visual entry", corpus},
      {"spoof samples stay in the 1-edit set and the known example is reachable", spoofer},
      {"metrics match rational arithmetic within 1e-12", metrics},
      {"service round trip, capture file, 409 conflict, loopback default", service},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Problems p;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(p);
    } catch (const std::exception& e) {
      p.items.push_back(std::string("exception: ") + e.what());
    }
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    const bool ok = p.items.empty();
    failed += !ok;
    std::string detail;
    for (std::size_t i = 0; i < p.items.size() && i < 5; ++i) detail += (i ? "; " : ": ") + p.items[i];
    if (p.items.size() > 5) detail += fmt::format(" (+{} more)", p.items.size() - 5);
    std::cout << (ok ? "PASS " : "FAIL ") << name << " [" << ms << " ms]" << detail << "\n";
  }
  std::cout << (failed ? fmt::format("{} criteria failed\n", failed) : "all criteria passed\n");
  return failed ? 1 : 0;
}
