// SPDX-License-Identifier: Apache-2.0
// phishgen command-line front end.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "phishgen/error.hpp"
#include "phishgen/metrics.hpp"
#include "phishgen/pipeline.hpp"
#include "phishgen/service.hpp"
#include "phishgen/url.hpp"

namespace {

using namespace phishgen;
using json = nlohmann::json;
namespace fs = std::filesystem;

struct Options {
  // shared
  std::string input;
  std::optional<std::string> origin;
  bool as_json = false;
  std::optional<std::uint64_t> seed;
  std::string out;
  FetchPolicy policy;

  // recipe
  std::string features;
  bool random = false;
  std::optional<int> count_content;
  std::optional<int> count_visual;
  std::vector<std::string> params;
  std::optional<std::string> params_file;
  std::optional<std::string> rules_file;
  int min_edits = 1;

  // features
  std::optional<std::string> category;

  // batch / variants
  unsigned threads = 0;
  std::string kinds = "opacity,watermark,rotate,blur,grey_mesh,noise";

  // score
  std::string verdicts;

  // serve
  ServiceConfig service;
  bool no_banner = false;
  int ttl_minutes = 60;
  std::optional<std::string> ui_dir;
};

std::string default_out_dir() {
  const char* env = std::getenv("PHISHGEN_OUT_DIR");
  return env && *env ? env : "phishgen-out";
}

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  std::random_device rd;
  const auto seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  fmt::print(stderr, "seed: {}\n", seed);
  return seed;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A snapshot directory, a URL or a local HTML file.
WebpageSnapshot load(const Options& o) {
  if (fs::is_directory(o.input) && fs::exists(fs::path(o.input) / "snapshot.json")) return read_snapshot(o.input);
  return load_input({o.input, o.origin}, o.policy);
}

// "C3.probability=0.5"; the value is JSON when it parses, else a string.
void apply_param(json& params, const std::string& spec) {
  const auto eq = spec.find('=');
  const auto dot = spec.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw CLI::ValidationError("--param", "expected FEATURE.NAME=VALUE, got '" + spec + "'");
  const auto id = parse_feature_id(spec.substr(0, dot));
  if (!id) throw CLI::ValidationError("--param", "unknown feature in '" + spec + "'");
  const auto name = spec.substr(dot + 1, eq - dot - 1);
  const auto raw = spec.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  params[std::string(to_string(*id))][name] = value;
}

GenerationRecipe build_recipe(const Options& o, std::uint64_t seed) {
  GenerationRecipe r;
  r.seed = seed;
  if (o.random) {
    r.mode = SelectionMode::random;
    r.count_content = o.count_content;
    r.count_visual = o.count_visual;
  } else {
    if (o.features.empty()) throw CLI::ValidationError("--features", "give --features or --random");
    r.mode = SelectionMode::explicit_list;
    try {
      r.features = parse_feature_list(o.features);
    } catch (const Error& e) {
      throw CLI::ValidationError("--features", e.what());
    }
  }
  if (o.params_file) {
    try {
      r.params = json::parse(read_text(*o.params_file));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse_error, std::string("params file: ") + e.what());
    }
  }
  for (const auto& p : o.params) apply_param(r.params, p);
  if (o.rules_file) r.spoof_rules = load_spoof_rules(*o.rules_file);
  r.spoof_min_edits = o.min_edits;
  r.validate();
  return r;
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_features(const Options& o) {
  std::optional<FeatureCategory> filter;
  if (o.category) filter = parse_category(*o.category);
  if (o.as_json) {
    print_json(catalog_to_json(filter));
    return 0;
  }
  for (const auto& f : feature_catalog()) {
    if (filter && f.category != *filter) continue;
    fmt::print("{:<4}{:<9}{}: {}\n", to_string(f.id), to_string(f.category), f.title, f.description);
  }
  return 0;
}

int cmd_fetch(const Options& o) {
  const auto snapshot = load(o);
  write_snapshot(snapshot, o.out);
  std::size_t missing = 0;
  for (const auto& [path, rec] : snapshot.assets) missing += rec.missing();
  if (o.as_json) {
    print_json({{"schema_version", 1}, {"path", o.out}, {"origin_url", snapshot.origin_url},
                {"fetch_status", to_string(snapshot.fetch_status)}, {"assets", snapshot.assets.size()},
                {"missing", missing}});
  } else {
    fmt::print("{}\n{} assets ({} missing), {}\n", o.out, snapshot.assets.size(), missing,
               to_string(snapshot.fetch_status));
  }
  return 0;
}

int cmd_analyze(const Options& o) {
  const auto snapshot = load(o);
  const auto doc = parse_document(snapshot.markup);
  const auto report = analyze_applicability(doc, &snapshot.assets);
  if (o.as_json) {
    print_json({{"schema_version", 1}, {"source_url", snapshot.origin_url}, {"report", to_json(report)}});
    return 0;
  }
  for (const auto& e : report.entries) {
    fmt::print("{:<4}{:<4}{:>5}  {}\n", to_string(e.id), e.applicable ? "yes" : "no", e.evidence.size(),
               feature_info(e.id).title);
  }
  return 0;
}

json bundle_summary(const GeneratedBundle& b, const fs::path& dir) {
  json features = json::array();
  for (const auto& app : b.ledger) features.push_back(to_string(app.feature));
  json skipped = json::array();
  for (const auto& s : b.skipped) skipped.push_back({{"feature", to_string(s.feature)}, {"reason", s.reason}});
  return {{"id", b.id}, {"path", dir.string()}, {"seed", b.recipe.seed}, {"source_url", b.source_url},
          {"spoofed_url", b.spoofed_url}, {"features", features}, {"skipped", skipped}};
}

void print_bundle(const GeneratedBundle& b, const fs::path& dir) {
  std::string features;
  for (const auto& app : b.ledger) features += (features.empty() ? "" : ",") + std::string(to_string(app.feature));
  fmt::print("{}\n{}\n", dir.string(), b.spoofed_url.empty() ? "(no spoofed URL)" : b.spoofed_url);
  fmt::print(stderr, "applied: {}\n", features);
  for (const auto& s : b.skipped) fmt::print(stderr, "skipped {}: {}\n", to_string(s.feature), s.reason);
}

int cmd_generate(const Options& o) {
  const auto snapshot = load(o);
  const auto recipe = build_recipe(o, resolve_seed(o));
  const auto bundle = generate(snapshot, recipe);
  const auto dir = fs::path(o.out) / bundle.id;
  write_bundle(bundle, dir);
  if (o.as_json) {
    print_json({{"schema_version", 1}, {"bundle", bundle_summary(bundle, dir)}});
  } else {
    print_bundle(bundle, dir);
  }
  return 0;
}

std::vector<BatchInput> read_batch_list(const fs::path& list) {
  std::vector<BatchInput> inputs;
  std::istringstream in(read_text(list));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream fields(line.substr(start));
    BatchInput input;
    fields >> input.source;
    std::string origin;
    if (fields >> origin) input.origin = origin;
    // Relative file paths are relative to the list file.
    if (!is_web_url(input.source) && fs::path(input.source).is_relative())
      input.source = (list.parent_path() / input.source).lexically_normal().string();
    inputs.push_back(std::move(input));
  }
  return inputs;
}

int cmd_batch(const Options& o) {
  const auto inputs = read_batch_list(o.input);
  const auto recipe = build_recipe(o, resolve_seed(o));
  const auto manifest = batch_generate(inputs, recipe, o.out, o.policy, o.threads);
  const auto path = fs::path(o.out) / "manifest.json";
  if (o.as_json) {
    print_json({{"schema_version", 1}, {"manifest", path.string()}, {"inputs", manifest.inputs},
                {"generated", manifest.entries.size()}, {"failed", manifest.failures.size()}});
  } else {
    fmt::print("{}\n", path.string());
    fmt::print(stderr, "{} inputs, {} bundles, {} failures\n", manifest.inputs, manifest.entries.size(),
               manifest.failures.size());
    for (const auto& f : manifest.failures) fmt::print(stderr, "failed {}: {}\n", f.source, f.error);
  }
  return manifest.entries.empty() ? 2 : 0;
}

int cmd_variants(const Options& o) {
  std::vector<LogoTransform> kinds;
  std::istringstream in(o.kinds);
  for (std::string k; std::getline(in, k, ',');) {
    const auto t = parse_logo_transform(k);
    if (!t) throw CLI::ValidationError("--kinds", "unknown transform '" + k + "'");
    kinds.push_back(*t);
  }
  const auto snapshot = load(o);
  Options recipe_opts = o;
  if (recipe_opts.features.empty()) recipe_opts.random = true;
  auto recipe = build_recipe(recipe_opts, resolve_seed(o));
  const auto bundles = generate_logo_variants(snapshot, recipe, kinds);
  json out = json::array();
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const auto dir = fs::path(o.out) / bundles[i].id;
    write_bundle(bundles[i], dir);
    auto summary = bundle_summary(bundles[i], dir);
    summary["transform"] = to_string(kinds[i]);
    out.push_back(summary);
    if (!o.as_json) fmt::print("{}\t{}\n", to_string(kinds[i]), dir.string());
  }
  if (o.as_json) print_json({{"schema_version", 1}, {"bundles", out}});
  return 0;
}

int cmd_spoof(const Options& o) {
  const auto rules = o.rules_file ? load_spoof_rules(*o.rules_file) : default_spoof_rules();
  Rng rng(derive_seed(resolve_seed(o), "spoof"));
  SpoofResult result;
  std::string spoofed;
  if (is_web_url(o.input)) {
    spoofed = spoof_url(o.input, rules, rng, o.min_edits, &result);
  } else {
    result = spoof_domain(o.input, rules, rng, o.min_edits);
    spoofed = result.spoofed_domain;
  }
  if (o.as_json) {
    auto j = to_json(result);
    j["schema_version"] = 1;
    j["input"] = o.input;
    j["spoofed"] = spoofed;
    print_json(j);
    return 0;
  }
  fmt::print("{}\n", spoofed);
  for (const auto& e : result.edits)
    fmt::print("  {:<9} @{:<3} '{}' -> '{}'\n", to_string(e.kind), e.position, e.before, e.after);
  return 0;
}

int cmd_score(const Options& o) {
  const auto rows = parse_verdicts(read_text(o.verdicts));
  std::vector<std::pair<Verdict, Verdict>> pairs;
  for (const auto& r : rows) pairs.emplace_back(r.actual, r.predicted);
  const auto counts = tally(pairs);
  const auto report = score(counts);
  if (o.as_json) {
    print_json({{"schema_version", 1}, {"counts", to_json(counts)}, {"scores", to_json(report)}});
    return 0;
  }
  auto show = [](const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string("undefined"); };
  fmt::print("TP {}  FP {}  TN {}  FN {}\n", counts.tp, counts.fp, counts.tn, counts.fn);
  fmt::print("accuracy  {:.4f}\nprecision {}\nrecall    {}\nf1        {}\n", report.accuracy, show(report.precision),
             show(report.recall), show(report.f1));
  return 0;
}

Service* g_service = nullptr;

int cmd_serve(Options o) {
  o.service.banner = !o.no_banner;
  o.service.session_ttl = std::chrono::minutes(o.ttl_minutes);
  o.service.sandbox_dir = fs::path(o.out) / "sessions";
  o.service.fetch_policy = o.policy;
  if (o.ui_dir) o.service.ui_dir = *o.ui_dir;
  Service service(o.service);
  const int port = service.bind();
  fmt::print(stderr, "listening on http://{}:{}/ (sandbox {})\n", o.service.host, port, o.service.sandbox_dir.string());
  g_service = &service;
  std::signal(SIGINT, [](int) { if (g_service) g_service->stop(); });
  std::signal(SIGTERM, [](int) { if (g_service) g_service->stop(); });
  service.run();
  g_service = nullptr;
  return 0;
}

void add_input(CLI::App* cmd, Options& o, const char* what) {
  cmd->add_option("input", o.input, what)->required();
  cmd->add_option("--origin", o.origin, "URL a local file pretends to come from");
}

void add_policy(CLI::App* cmd, Options& o) {
  cmd->add_option("--timeout", o.policy.timeout_s, "Network timeout in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--max-asset-bytes", o.policy.max_asset_bytes, "Largest asset to download");
  cmd->add_option("--max-assets", o.policy.max_assets, "Most assets to download per page");
  cmd->add_option("--user-agent", o.policy.user_agent, "User-Agent header");
}

void add_recipe(CLI::App* cmd, Options& o) {
  auto* feats = cmd->add_option("--features", o.features, "Comma-separated feature ids, e.g. C1,C12,V1");
  auto* rand = cmd->add_flag("--random", o.random, "Sample applicable features");
  feats->excludes(rand);
  cmd->add_option("--count-content", o.count_content, "Content features in random mode")->needs(rand);
  cmd->add_option("--count-visual", o.count_visual, "Visual features in random mode")->needs(rand);
  cmd->add_option("--param", o.params, "Feature parameter, FEATURE.NAME=VALUE (repeatable)");
  cmd->add_option("--params-file", o.params_file, "JSON object of per-feature parameters")->check(CLI::ExistingFile);
  cmd->add_option("--spoof-rules", o.rules_file, "Spoof rule file")->check(CLI::ExistingFile);
  cmd->add_option("--min-edits", o.min_edits, "Minimum domain edits")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial phishing page generator for detector robustness research"};
  app.require_subcommand(1);
  Options o;
  o.out = default_out_dir();
  int (*run)(const Options&) = nullptr;

  auto add_common = [&](CLI::App* cmd, bool seeded, bool writes) {
    cmd->add_flag("--json", o.as_json, "Machine-readable output");
    if (seeded) cmd->add_option("--seed", o.seed, "Random seed (logged when omitted)");
    if (writes) cmd->add_option("--out,-o", o.out, "Output directory (default $PHISHGEN_OUT_DIR or ./phishgen-out)");
  };

  auto* features = app.add_subcommand("features", "List the feature catalog");
  features->add_option("--category", o.category, "content or visual")->check(CLI::IsMember({"content", "visual"}));
  add_common(features, false, false);
  features->callback([&] { run = cmd_features; });

  auto* fetch = app.add_subcommand("fetch", "Download a page and its assets into a snapshot directory");
  add_input(fetch, o, "URL or HTML file");
  add_policy(fetch, o);
  add_common(fetch, false, true);
  fetch->callback([&] { run = cmd_fetch; });

  auto* analyze = app.add_subcommand("analyze", "Report which features apply to a page");
  add_input(analyze, o, "URL, HTML file or snapshot directory");
  add_policy(analyze, o);
  add_common(analyze, false, false);
  analyze->callback([&] { run = cmd_analyze; });

  auto* gen = app.add_subcommand("generate", "Generate one phishing bundle");
  add_input(gen, o, "URL, HTML file or snapshot directory");
  add_policy(gen, o);
  add_recipe(gen, o);
  add_common(gen, true, true);
  gen->callback([&] { run = cmd_generate; });

  auto* batch = app.add_subcommand("batch", "Generate a corpus from a list of inputs");
  add_input(batch, o, "File with one URL or HTML path per line (optional origin after whitespace)");
  add_policy(batch, o);
  add_recipe(batch, o);
  add_common(batch, true, true);
  batch->add_option("--threads", o.threads, "Worker threads (default: hardware)");
  batch->callback([&] { run = cmd_batch; });

  auto* variants = app.add_subcommand("variants", "One bundle per logo transform, sharing content features");
  add_input(variants, o, "URL, HTML file or snapshot directory");
  add_policy(variants, o);
  add_recipe(variants, o);
  add_common(variants, true, true);
  variants->add_option("--kinds", o.kinds, "Comma-separated transforms");
  variants->callback([&] { run = cmd_variants; });

  auto* spoof = app.add_subcommand("spoof", "Make a lookalike domain or URL");
  spoof->add_option("input", o.input, "URL or domain")->required();
  spoof->add_option("--min-edits", o.min_edits, "Minimum edits")->check(CLI::PositiveNumber);
  spoof->add_option("--rules", o.rules_file, "Spoof rule file")->check(CLI::ExistingFile);
  add_common(spoof, true, false);
  spoof->callback([&] { run = cmd_spoof; });

  auto* score_cmd = app.add_subcommand("score", "Score detector verdicts");
  score_cmd->add_option("--verdicts", o.verdicts, "id,actual,predicted rows")->required()->check(CLI::ExistingFile);
  add_common(score_cmd, false, false);
  score_cmd->callback([&] { run = cmd_score; });

  auto* serve = app.add_subcommand("serve", "Run the HTTP API and preview server");
  serve->add_option("--host", o.service.host, "Bind address (loopback unless --allow-remote)");
  serve->add_option("--port", o.service.port, "Port (0 picks one)")->check(CLI::Range(0, 65535));
  serve->add_flag("--allow-remote", o.service.allow_remote, "Permit a non-loopback bind address");
  serve->add_option("--ui", o.ui_dir, "Directory of static UI files")->check(CLI::ExistingDirectory);
  serve->add_option("--cors-origin", o.service.cors_origin, "Origin allowed to call the API");
  serve->add_flag("--no-banner", o.no_banner, "Do not stamp the research banner into previews");
  serve->add_option("--session-ttl", o.ttl_minutes, "Session lifetime in minutes")->check(CLI::PositiveNumber);
  add_policy(serve, o);
  add_common(serve, false, true);
  serve->callback([&] { run = nullptr; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (serve->parsed()) return cmd_serve(o);
    return run(o);
  } catch (const CLI::ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const Error& e) {
    fmt::print(stderr, "error ({}): {}\n", to_string(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
}
