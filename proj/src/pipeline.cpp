// SPDX-License-Identifier: Apache-2.0
#include "phishgen/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "phishgen/error.hpp"
#include "phishgen/url.hpp"
#include "phishgen/visual_features.hpp"

namespace phishgen {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io_error, "write failed: " + p.string());
}

json parse_json_file(const fs::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, p.filename().string() + ": " + e.what());
  }
}

json features_json(const std::vector<FeatureId>& ids) {
  json out = json::array();
  for (auto id : ids) out.push_back(to_string(id));
  return out;
}

std::vector<FeatureId> features_from_json(const json& j) {
  std::vector<FeatureId> out;
  for (const auto& v : j) {
    auto id = parse_feature_id(v.get<std::string>());
    if (!id) throw Error(ErrorCode::parse_error, "unknown feature " + v.dump());
    out.push_back(*id);
  }
  return out;
}

json rules_json(const SpoofRuleSet& r) {
  json glyphs = json::array();
  for (const auto& [key, reps] : r.homoglyphs) glyphs.push_back({{"key", key}, {"replacements", reps}});
  return {{"homoglyphs", std::move(glyphs)},
          {"prefixes", r.prefixes},
          {"suffixes", r.suffixes},
          {"tld_swaps", r.tld_swaps}};
}

SpoofRuleSet rules_from_json(const json& j) {
  SpoofRuleSet r;
  for (const auto& g : j.at("homoglyphs"))
    r.homoglyphs.emplace_back(g.at("key").get<std::string>(), g.at("replacements").get<std::vector<std::string>>());
  r.prefixes = j.at("prefixes").get<std::vector<std::string>>();
  r.suffixes = j.at("suffixes").get<std::vector<std::string>>();
  r.tld_swaps = j.at("tld_swaps").get<std::vector<std::string>>();
  r.validate();
  return r;
}

json skipped_json(const std::vector<SkippedFeature>& skipped) {
  json out = json::array();
  for (const auto& s : skipped) out.push_back({{"feature", to_string(s.feature)}, {"reason", s.reason}});
  return out;
}

ApplicabilityOptions applicability_options(const GenerationRecipe& recipe) {
  ApplicabilityOptions opts;
  const auto& c8 = recipe.params_for(FeatureId::C8);
  if (c8.is_object() && c8.contains("brands") && c8["brands"].is_array())
    opts.login_brands = c8["brands"].get<std::vector<std::string>>();
  return opts;
}

bool is_skippable(const Error& e) {
  return e.code() == ErrorCode::feature_not_applicable || e.code() == ErrorCode::no_logo_candidate;
}

// Canonical order: catalog order, content before visual.
void canonical_sort(std::vector<FeatureId>& ids) {
  std::sort(ids.begin(), ids.end(), [](FeatureId a, FeatureId b) { return catalog_index(a) < catalog_index(b); });
}

std::string origin_for_file(const fs::path& file, const std::string& markup) {
  try {
    auto doc = parse_document(markup);
    for (auto* link : doc.elements("link")) {
      const auto* rel = link->attribute("rel");
      const auto* href = link->attribute("href");
      if (rel && href && *rel == "canonical" && is_web_url(*href)) return *href;
    }
    for (auto* base : doc.elements("base")) {
      const auto* href = base->attribute("href");
      if (href && is_web_url(*href)) return resolve_reference(*href, file.filename().string());
    }
  } catch (const Error&) {
  }
  std::string stem;
  for (char c : file.stem().string()) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    stem += ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) ? c : '-';
  }
  while (!stem.empty() && stem.front() == '-') stem.erase(stem.begin());
  while (!stem.empty() && stem.back() == '-') stem.pop_back();
  if (stem.empty()) stem = "page";
  std::string name;
  for (char c : file.filename().string()) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_') {
      name += c;
    } else {
      name += fmt::format("%{:02X}", static_cast<unsigned char>(c));
    }
  }
  return "https://" + stem + ".example/" + name;
}

void run_parallel(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, count)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) task(i);
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

class ManifestBuilder {
 public:
  explicit ManifestBuilder(const fs::path& out) : out_(out) {}

  // Claims a bundle id; false if another input already produced it.
  bool claim(const std::string& id) {
    std::lock_guard lock(mu_);
    return claimed_.insert(id).second;
  }
  void add(ManifestEntry e) {
    std::lock_guard lock(mu_);
    manifest_.entries.push_back(std::move(e));
  }
  void fail(std::string source, std::string error) {
    std::lock_guard lock(mu_);
    manifest_.failures.push_back({std::move(source), std::move(error)});
  }
  CorpusManifest finish(std::size_t inputs) {
    manifest_.inputs = inputs;
    std::sort(manifest_.entries.begin(), manifest_.entries.end(), [](const auto& a, const auto& b) {
      return std::tie(a.source_url, a.id) < std::tie(b.source_url, b.id);
    });
    std::sort(manifest_.failures.begin(), manifest_.failures.end(), [](const auto& a, const auto& b) {
      return std::tie(a.source, a.error) < std::tie(b.source, b.error);
    });
    write_file(out_ / "manifest.json", to_json(manifest_).dump(2) + "\n");
    return manifest_;
  }

 private:
  fs::path out_;
  std::mutex mu_;
  std::set<std::string> claimed_;
  CorpusManifest manifest_;
};

void produce(const WebpageSnapshot& snapshot, const GenerationRecipe& recipe_template, const fs::path& out_dir,
             ManifestBuilder& builder, const std::string& source_label) {
  GenerationRecipe recipe = recipe_template;
  recipe.seed = per_input_seed(recipe_template.seed, snapshot.origin_url);
  const auto id = hex_id(recipe.seed);
  if (!builder.claim(id)) {
    builder.fail(source_label, "duplicate input: " + snapshot.origin_url);
    return;
  }
  auto bundle = generate(snapshot, recipe);
  write_bundle(bundle, out_dir / bundle.id);
  ManifestEntry e;
  e.id = bundle.id;
  e.source_url = bundle.source_url;
  e.bundle_path = bundle.id;
  e.spoofed_url = bundle.spoofed_url;
  e.seed = recipe.seed;
  for (const auto& app : bundle.ledger) e.features.emplace_back(to_string(app.feature));
  builder.add(std::move(e));
}

}  // namespace

// --- recipe -----------------------------------------------------------------

void GenerationRecipe::validate() const {
  if (mode == SelectionMode::explicit_list) {
    if (features.empty()) throw Error(ErrorCode::invalid_argument, "explicit selection needs at least one feature");
    std::set<FeatureId> seen;
    for (auto id : features) {
      if (!seen.insert(id).second)
        throw Error(ErrorCode::invalid_argument, "feature listed twice: " + std::string(to_string(id)));
    }
    if (seen.contains(FeatureId::C5) && seen.contains(FeatureId::C10))
      throw Error(ErrorCode::conflicting_features, "C5 and C10 cannot be combined");
  } else {
    if (count_content && (*count_content < 0 || *count_content > static_cast<int>(kContentFeatureCount)))
      throw Error(ErrorCode::invalid_argument, "count_content must be in [0, 12]");
    if (count_visual && (*count_visual < 0 || *count_visual > static_cast<int>(kVisualFeatureCount)))
      throw Error(ErrorCode::invalid_argument, "count_visual must be in [0, 5]");
    if (count_content && count_visual && *count_content + *count_visual == 0)
      throw Error(ErrorCode::invalid_argument, "random selection needs at least one feature");
  }
  if (!params.is_object()) throw Error(ErrorCode::invalid_argument, "params must be an object");
  for (const auto& [key, value] : params.items()) {
    const auto id = parse_feature_id(key);
    if (!id) throw Error(ErrorCode::invalid_params, "params for unknown feature '" + key + "'");
    resolve_params(*id, value);
  }
  phishgen::validate(capture);
  spoof_rules.validate();
  if (spoof_min_edits < 1) throw Error(ErrorCode::invalid_argument, "spoof_min_edits must be positive");
}

const nlohmann::json& GenerationRecipe::params_for(FeatureId id) const {
  static const json empty = json::object();
  const auto key = std::string(to_string(id));
  if (params.is_object() && params.contains(key)) return params.at(key);
  return empty;
}

json to_json(const GenerationRecipe& r) {
  json selection;
  if (r.mode == SelectionMode::explicit_list) {
    selection = {{"mode", "explicit"}, {"features", features_json(r.features)}};
  } else {
    selection = {{"mode", "random"},
                 {"count_content", r.count_content ? json(*r.count_content) : json()},
                 {"count_visual", r.count_visual ? json(*r.count_visual) : json()}};
  }
  return {{"schema_version", 1},
          {"seed", r.seed},
          {"selection", std::move(selection)},
          {"params", r.params},
          {"capture", to_json(r.capture)},
          {"spoof", {{"min_edits", r.spoof_min_edits}, {"rules", rules_json(r.spoof_rules)}}}};
}

GenerationRecipe recipe_from_json(const json& j) {
  GenerationRecipe r;
  try {
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto& sel = j.at("selection");
    if (sel.at("mode") == "explicit") {
      r.mode = SelectionMode::explicit_list;
      r.features = features_from_json(sel.at("features"));
    } else {
      r.mode = SelectionMode::random;
      if (sel.contains("count_content") && !sel["count_content"].is_null()) r.count_content = sel["count_content"].get<int>();
      if (sel.contains("count_visual") && !sel["count_visual"].is_null()) r.count_visual = sel["count_visual"].get<int>();
    }
    r.params = j.value("params", json::object());
    if (j.contains("capture")) r.capture = capture_config_from_json(j["capture"]);
    if (j.contains("spoof")) {
      r.spoof_min_edits = j["spoof"].value("min_edits", 1);
      if (j["spoof"].contains("rules")) r.spoof_rules = rules_from_json(j["spoof"]["rules"]);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("recipe: ") + e.what());
  }
  return r;
}

// --- selection ----------------------------------------------------------------

Selection select_features(const ApplicabilityReport& report, const GenerationRecipe& recipe, Rng& rng) {
  recipe.validate();
  Selection out;
  if (recipe.mode == SelectionMode::explicit_list) {
    for (auto id : recipe.features) {
      if (report.applicable(id)) {
        out.features.push_back(id);
      } else {
        out.skipped.push_back({id, "not applicable to this page"});
      }
    }
    if (out.features.empty())
      throw Error(ErrorCode::feature_not_applicable, "none of the requested features applies to this page");
    canonical_sort(out.features);
    return out;
  }

  std::vector<FeatureId> content, visual;
  for (auto id : report.applicable_features()) (category_of(id) == FeatureCategory::content ? content : visual).push_back(id);
  const int want_content = recipe.count_content ? *recipe.count_content : static_cast<int>(rng.uniform_int(3, 6));
  const int want_visual = recipe.count_visual ? *recipe.count_visual : static_cast<int>(rng.uniform_int(1, 2));

  auto sample = [&](std::vector<FeatureId> pool, int want, const char* what) {
    rng.shuffle(pool);
    std::vector<FeatureId> chosen;
    for (auto id : pool) {
      if (static_cast<int>(chosen.size()) >= want) break;
      const bool clash = (id == FeatureId::C5 && std::count(chosen.begin(), chosen.end(), FeatureId::C10)) ||
                         (id == FeatureId::C10 && std::count(chosen.begin(), chosen.end(), FeatureId::C5));
      if (clash) continue;
      chosen.push_back(id);
    }
    if (static_cast<int>(chosen.size()) < want)
      out.notes.push_back(fmt::format("requested {} {} features, only {} applicable", want, what, chosen.size()));
    return chosen;
  };
  auto c = sample(content, want_content, "content");
  auto v = sample(visual, want_visual, "visual");
  out.features = c;
  out.features.insert(out.features.end(), v.begin(), v.end());
  canonical_sort(out.features);
  return out;
}

// --- generation ---------------------------------------------------------------

std::string hex_id(std::uint64_t value) { return fmt::format("{:016x}", value); }

GeneratedBundle generate(const WebpageSnapshot& snapshot, const GenerationRecipe& recipe) {
  recipe.validate();
  Document doc = parse_document(snapshot.markup);
  const auto options = applicability_options(recipe);
  const auto report = analyze_applicability(doc, &snapshot.assets, options);

  Rng select_rng(derive_seed(recipe.seed, "select"));
  auto selection = select_features(report, recipe, select_rng);

  GeneratedBundle bundle;
  bundle.id = hex_id(recipe.seed);
  bundle.source_url = snapshot.origin_url;
  bundle.recipe = recipe;
  bundle.created_at = snapshot.fetched_at;
  bundle.skipped = selection.skipped;

  // The spoofed domain is known before features run so V4 can stamp it.
  Rng spoof_rng(derive_seed(recipe.seed, "spoof"));
  try {
    bundle.spoofed_url = spoof_url(snapshot.origin_url, recipe.spoof_rules, spoof_rng, recipe.spoof_min_edits,
                                   &bundle.spoof);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::invalid_argument && e.code() != ErrorCode::no_applicable_rule) throw;
    bundle.spoof = {};
    bundle.spoofed_url.clear();
  }

  AssetMap assets = snapshot.assets;
  VisualOptions visual;
  visual.seed = recipe.seed;
  visual.watermark_text = bundle.spoof.spoofed_domain;
  for (auto id : selection.features) {
    const auto now = analyze_applicability(doc, &assets, options);
    if (!now.applicable(id)) {
      bundle.skipped.push_back({id, "no longer applicable after earlier features"});
      continue;
    }
    Rng rng(derive_seed(recipe.seed, to_string(id)));
    try {
      if (category_of(id) == FeatureCategory::content) {
        bundle.ledger.push_back(apply_content_feature(doc, id, recipe.params_for(id), rng, recipe.capture));
      } else {
        bundle.ledger.push_back(apply_visual_feature(doc, assets, id, recipe.params_for(id), rng, visual));
      }
    } catch (const Error& e) {
      if (!is_skippable(e)) throw;
      bundle.skipped.push_back({id, e.what()});
    }
  }
  if (bundle.ledger.empty()) throw Error(ErrorCode::empty_ledger, "no feature could be applied to this page");

  // Capture files belong to the first capture feature (login page to C11).
  const auto files = build_capture_assets(recipe.capture);
  for (auto& app : bundle.ledger) {
    if (!uses_capture(app.feature)) continue;
    if (!assets.contains(files[0].first)) {
      assets[files[0].first] = AssetRecord{"", AssetKind::script, files[0].second, "application/javascript"};
      app.assets_added.push_back(files[0].first);
    }
    if (app.feature == FeatureId::C11) {
      assets[files[1].first] = AssetRecord{"", AssetKind::other, files[1].second, "text/html"};
      app.assets_added.push_back(files[1].first);
    }
  }
  bundle.document = serialize_document(doc);
  bundle.assets = std::move(assets);
  return bundle;
}

// --- bundle I/O ---------------------------------------------------------------

void write_bundle(const GeneratedBundle& bundle, const fs::path& dir) {
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::create_directories(dir);
  write_file(dir / "index.html", bundle.document);
  json assets = json::array();
  for (const auto& [path, rec] : bundle.assets) {
    if (!is_safe_relative_path(path) || path == "index.html" || path.ends_with(".json"))
      throw Error(ErrorCode::io_error, "refusing to write asset at '" + path + "'");
    if (!rec.missing()) write_file(dir / path, rec.bytes);
    assets.push_back({{"path", path},
                      {"original_url", rec.original_url},
                      {"kind", to_string(rec.kind)},
                      {"content_type", rec.content_type},
                      {"size", rec.bytes.size()},
                      {"missing", rec.missing()}});
  }
  json applied = json::array();
  for (const auto& app : bundle.ledger) applied.push_back(to_json(app));
  json ledger = {{"schema_version", 1}, {"applied", std::move(applied)}, {"skipped", skipped_json(bundle.skipped)}};
  write_file(dir / "ledger.json", ledger.dump(2) + "\n");
  write_file(dir / "recipe.json", to_json(bundle.recipe).dump(2) + "\n");
  json meta = {{"schema_version", 1},
               {"id", bundle.id},
               {"source_url", bundle.source_url},
               {"spoofed_url", bundle.spoofed_url},
               {"spoof", to_json(bundle.spoof)},
               {"created_at", bundle.created_at},
               {"assets", std::move(assets)}};
  write_file(dir / "bundle.json", meta.dump(2) + "\n");
}

GeneratedBundle read_bundle(const fs::path& dir) {
  GeneratedBundle b;
  const auto meta = parse_json_file(dir / "bundle.json");
  const auto ledger = parse_json_file(dir / "ledger.json");
  try {
    b.id = meta.at("id").get<std::string>();
    b.source_url = meta.at("source_url").get<std::string>();
    b.spoofed_url = meta.at("spoofed_url").get<std::string>();
    b.created_at = meta.at("created_at").get<std::int64_t>();
    const auto& spoof = meta.at("spoof");
    b.spoof.original_domain = spoof.at("original_domain").get<std::string>();
    b.spoof.spoofed_domain = spoof.at("spoofed_domain").get<std::string>();
    for (const auto& e : spoof.at("edits")) {
      SpoofEdit edit;
      const auto kind = e.at("kind").get<std::string>();
      for (auto k : {EditKind::homoglyph, EditKind::prefix, EditKind::suffix, EditKind::tld_swap}) {
        if (to_string(k) == kind) edit.kind = k;
      }
      edit.position = e.at("position").get<std::size_t>();
      edit.before = e.at("before").get<std::string>();
      edit.after = e.at("after").get<std::string>();
      b.spoof.edits.push_back(std::move(edit));
    }
    for (const auto& a : meta.at("assets")) {
      const auto path = a.at("path").get<std::string>();
      if (!is_safe_relative_path(path)) throw Error(ErrorCode::parse_error, "unsafe asset path: " + path);
      AssetRecord rec;
      rec.original_url = a.value("original_url", "");
      rec.kind = parse_asset_kind(a.value("kind", "other")).value_or(AssetKind::other);
      rec.content_type = a.value("content_type", "");
      if (!a.value("missing", false)) rec.bytes = read_file(dir / path);
      b.assets.emplace(path, std::move(rec));
    }
    for (const auto& app : ledger.at("applied")) b.ledger.push_back(feature_application_from_json(app));
    for (const auto& s : ledger.at("skipped")) {
      const auto id = parse_feature_id(s.at("feature").get<std::string>());
      if (!id) throw Error(ErrorCode::parse_error, "unknown feature in ledger");
      b.skipped.push_back({*id, s.at("reason").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bundle: ") + e.what());
  }
  b.recipe = recipe_from_json(parse_json_file(dir / "recipe.json"));
  b.document = read_file(dir / "index.html");
  return b;
}

// --- inputs and corpora ---------------------------------------------------------

WebpageSnapshot load_input(const BatchInput& input, const FetchPolicy& policy) {
  if (is_web_url(input.source)) {
    auto page = fetch_page(input.source, policy);
    if (input.origin) page.origin_url = *input.origin;
    return localize_assets(page, policy);
  }
  const fs::path file(input.source);
  if (!fs::is_regular_file(file)) throw Error(ErrorCode::io_error, "no such page: " + input.source);
  auto markup = read_file(file);
  const auto origin = input.origin ? *input.origin : origin_for_file(file, markup);
  auto page = snapshot_from_markup(std::move(markup), origin, 0);
  // Local pages stay offline: only files next to the page are loaded.
  return localize_assets(page, policy, directory_loader(origin, file.parent_path()));
}

std::uint64_t per_input_seed(std::uint64_t template_seed, std::string_view source_url) {
  return derive_seed(template_seed, source_url);
}

json to_json(const CorpusManifest& m) {
  json entries = json::array();
  std::size_t generated = 0;
  for (const auto& e : m.entries) {
    ++generated;
    entries.push_back({{"status", "ok"},
                       {"id", e.id},
                       {"source_url", e.source_url},
                       {"bundle_path", e.bundle_path},
                       {"spoofed_url", e.spoofed_url},
                       {"seed", e.seed},
                       {"features", e.features}});
  }
  json failures = json::array();
  for (const auto& f : m.failures) failures.push_back({{"status", "failed"}, {"source", f.source}, {"error", f.error}});
  return {{"schema_version", m.schema_version},
          {"entries", std::move(entries)},
          {"failures", std::move(failures)},
          {"totals", {{"inputs", m.inputs}, {"legitimate", m.inputs - m.failures.size()},
                      {"generated", generated}, {"failed", m.failures.size()}}}};
}

CorpusManifest batch_generate(const std::vector<BatchInput>& inputs, const GenerationRecipe& recipe_template,
                              const fs::path& out_dir, const FetchPolicy& policy, unsigned threads) {
  if (inputs.empty()) throw Error(ErrorCode::invalid_argument, "batch needs at least one input");
  recipe_template.validate();
  fs::create_directories(out_dir);
  ManifestBuilder builder(out_dir);
  run_parallel(inputs.size(), threads, [&](std::size_t i) {
    try {
      const auto snapshot = load_input(inputs[i], policy);
      produce(snapshot, recipe_template, out_dir, builder, inputs[i].source);
    } catch (const std::exception& e) {
      builder.fail(inputs[i].source, e.what());
    }
  });
  return builder.finish(inputs.size());
}

CorpusManifest batch_generate(const std::vector<WebpageSnapshot>& inputs, const GenerationRecipe& recipe_template,
                              const fs::path& out_dir, unsigned threads) {
  if (inputs.empty()) throw Error(ErrorCode::invalid_argument, "batch needs at least one input");
  recipe_template.validate();
  fs::create_directories(out_dir);
  ManifestBuilder builder(out_dir);
  run_parallel(inputs.size(), threads, [&](std::size_t i) {
    try {
      produce(inputs[i], recipe_template, out_dir, builder, inputs[i].origin_url);
    } catch (const std::exception& e) {
      builder.fail(inputs[i].origin_url, e.what());
    }
  });
  return builder.finish(inputs.size());
}

// --- logo variants -------------------------------------------------------------

std::string_view to_string(LogoTransform t) noexcept {
  switch (t) {
    case LogoTransform::opacity: return "opacity";
    case LogoTransform::watermark: return "watermark";
    case LogoTransform::rotate: return "rotate";
    case LogoTransform::blur: return "blur";
    case LogoTransform::grey_mesh: return "grey_mesh";
    case LogoTransform::noise: return "noise";
  }
  return "opacity";
}

std::optional<LogoTransform> parse_logo_transform(std::string_view text) {
  for (auto t : {LogoTransform::opacity, LogoTransform::watermark, LogoTransform::rotate, LogoTransform::blur,
                 LogoTransform::grey_mesh, LogoTransform::noise}) {
    if (to_string(t) == text) return t;
  }
  if (text == "gaussian_blur") return LogoTransform::blur;
  return std::nullopt;
}

std::vector<GeneratedBundle> generate_logo_variants(const WebpageSnapshot& snapshot, const GenerationRecipe& base,
                                                    const std::vector<LogoTransform>& transforms) {
  base.validate();
  const Document doc = parse_document(snapshot.markup);
  if (locate_logo_candidates(doc, &snapshot.assets).empty())
    throw Error(ErrorCode::no_logo_candidate, "page has no .png/.svg logo asset");
  if (transforms.empty()) return {};

  // Content features are chosen once and shared by every variant.
  const auto report = analyze_applicability(doc, &snapshot.assets, applicability_options(base));
  Rng select_rng(derive_seed(base.seed, "select"));
  std::vector<FeatureId> content;
  if (base.mode == SelectionMode::explicit_list) {
    for (auto id : base.features) {
      if (category_of(id) == FeatureCategory::content && report.applicable(id)) content.push_back(id);
    }
  } else {
    GenerationRecipe content_only = base;
    content_only.count_visual = 0;
    if (content_only.count_content && *content_only.count_content == 0) content_only.count_content = std::nullopt;
    for (auto id : select_features(report, content_only, select_rng).features) content.push_back(id);
  }

  std::vector<GeneratedBundle> out;
  for (auto t : transforms) {
    GenerationRecipe r = base;
    r.mode = SelectionMode::explicit_list;
    r.features = content;
    r.count_content.reset();
    r.count_visual.reset();
    FeatureId visual = FeatureId::V5;
    json p = json::object();
    switch (t) {
      case LogoTransform::opacity: visual = FeatureId::V3; break;
      case LogoTransform::watermark: visual = FeatureId::V4; break;
      case LogoTransform::rotate: p["kind"] = "rotate"; break;
      case LogoTransform::blur: p["kind"] = "gaussian_blur"; break;
      case LogoTransform::grey_mesh: p["kind"] = "grey_mesh"; break;
      case LogoTransform::noise: p["kind"] = "noise"; break;
    }
    r.features.push_back(visual);
    const auto key = std::string(to_string(visual));
    json merged = r.params.contains(key) ? r.params[key] : json::object();
    for (const auto& [k, v] : p.items()) merged[k] = v;
    r.params[key] = merged;
    auto bundle = generate(snapshot, r);
    bundle.id = hex_id(derive_seed(base.seed, "variant:" + std::string(to_string(t))));
    out.push_back(std::move(bundle));
  }
  return out;
}

}  // namespace phishgen
