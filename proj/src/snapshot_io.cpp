// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "phishgen/error.hpp"
#include "phishgen/snapshot.hpp"

namespace phishgen {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr std::array<std::pair<std::string_view, std::string_view>, 18> kTypes = {{
    {"css", "text/css"},
    {"js", "application/javascript"},
    {"png", "image/png"},
    {"jpg", "image/jpeg"},
    {"jpeg", "image/jpeg"},
    {"gif", "image/gif"},
    {"svg", "image/svg+xml"},
    {"webp", "image/webp"},
    {"ico", "image/x-icon"},
    {"woff", "font/woff"},
    {"woff2", "font/woff2"},
    {"ttf", "font/ttf"},
    {"otf", "font/otf"},
    {"html", "text/html"},
    {"htm", "text/html"},
    {"json", "application/json"},
    {"txt", "text/plain"},
    {"bin", "application/octet-stream"},
}};

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

}  // namespace

std::string_view to_string(AssetKind kind) noexcept {
  switch (kind) {
    case AssetKind::stylesheet: return "stylesheet";
    case AssetKind::script: return "script";
    case AssetKind::image: return "image";
    case AssetKind::font: return "font";
    case AssetKind::other: return "other";
  }
  return "other";
}

std::string_view to_string(FetchStatus status) noexcept {
  return status == FetchStatus::complete ? "complete" : "partial";
}

std::optional<AssetKind> parse_asset_kind(std::string_view text) {
  for (auto k : {AssetKind::stylesheet, AssetKind::script, AssetKind::image, AssetKind::font, AssetKind::other}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string content_type_for_extension(std::string_view ext) {
  std::string e(ext);
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& [x, type] : kTypes) {
    if (x == e) return std::string(type);
  }
  return "application/octet-stream";
}

std::string extension_for_content_type(std::string_view content_type) {
  auto semi = content_type.find(';');
  std::string t(content_type.substr(0, semi));
  t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }), t.end());
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "text/javascript" || t == "application/x-javascript") return "js";
  if (t == "image/jpg") return "jpg";
  if (t == "image/vnd.microsoft.icon") return "ico";
  if (t == "application/font-woff") return "woff";
  for (const auto& [x, type] : kTypes) {
    if (type == t && x != "jpeg" && x != "htm") return std::string(x);
  }
  return "";
}

bool is_safe_relative_path(std::string_view path) {
  if (path.empty() || path.front() == '/' || path.find('\\') != std::string_view::npos ||
      path.find(':') != std::string_view::npos || path.find('\0') != std::string_view::npos)
    return false;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    const auto seg = path.substr(start, end - start);
    if (seg == ".." || seg == "." || seg.empty()) return false;
    start = end + 1;
  }
  return true;
}

void write_snapshot(const WebpageSnapshot& snapshot, const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "page.html", snapshot.markup);
  json assets = json::array();
  for (const auto& [path, record] : snapshot.assets) {
    if (!is_safe_relative_path(path)) throw Error(ErrorCode::io_error, "unsafe asset path: " + path);
    if (!record.missing()) write_file(dir / path, record.bytes);
    assets.push_back({{"path", path},
                      {"original_url", record.original_url},
                      {"kind", to_string(record.kind)},
                      {"content_type", record.content_type},
                      {"size", record.bytes.size()},
                      {"missing", record.missing()}});
  }
  json meta = {{"schema_version", 1},
               {"origin_url", snapshot.origin_url},
               {"fetched_at", snapshot.fetched_at},
               {"fetch_status", to_string(snapshot.fetch_status)},
               {"assets", std::move(assets)}};
  write_file(dir / "snapshot.json", meta.dump(2) + "\n");
}

WebpageSnapshot read_snapshot(const fs::path& dir) {
  json meta;
  try {
    meta = json::parse(read_file(dir / "snapshot.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, "snapshot.json: " + std::string(e.what()));
  }
  WebpageSnapshot s;
  s.origin_url = meta.at("origin_url").get<std::string>();
  s.fetched_at = meta.at("fetched_at").get<std::int64_t>();
  s.fetch_status = meta.at("fetch_status") == "partial" ? FetchStatus::partial : FetchStatus::complete;
  s.markup = read_file(dir / "page.html");
  for (const auto& a : meta.at("assets")) {
    const auto path = a.at("path").get<std::string>();
    if (!is_safe_relative_path(path)) throw Error(ErrorCode::parse_error, "unsafe asset path: " + path);
    AssetRecord r;
    r.original_url = a.value("original_url", "");
    r.kind = parse_asset_kind(a.value("kind", "other")).value_or(AssetKind::other);
    r.content_type = a.value("content_type", "");
    if (!a.value("missing", false)) r.bytes = read_file(dir / path);
    s.assets.emplace(path, std::move(r));
  }
  return s;
}

}  // namespace phishgen
