// SPDX-License-Identifier: Apache-2.0
// Shared fixtures for unit and acceptance tests.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "phishgen/html.hpp"
#include "phishgen/image.hpp"
#include "phishgen/ledger.hpp"
#include "phishgen/snapshot.hpp"

namespace fixtures {

phishgen::RasterImage solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b, std::uint8_t a = 255);
/// Deterministic pattern with varied colour and alpha.
phishgen::RasterImage pattern(int w, int h, std::uint32_t salt = 0);
std::string png(const phishgen::RasterImage& img);

/// Snapshot from markup plus assets already keyed by bundle path.
phishgen::WebpageSnapshot snapshot(std::string markup, std::string origin = "https://www.example.com/index.html",
                                   phishgen::AssetMap assets = {});

/// Page with header logo (assets/logo.png), nav links, a login form and text.
phishgen::WebpageSnapshot login_page();
/// Same shape with an SVG logo.
phishgen::WebpageSnapshot svg_logo_page();

/// i-th page of a varied synthetic corpus; every page has at least one link.
std::string corpus_page(int i);
/// Writes corpus pages 0..n-1 (with their logo files) into dir; returns the
/// file paths in order.
std::vector<std::filesystem::path> write_corpus(const std::filesystem::path& dir, int n);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

/// Every file under dir (relative path -> bytes).
std::map<std::string, std::string> read_tree(const std::filesystem::path& dir);

/// Loopback HTTP server serving fixed documents.
class FixtureServer {
 public:
  FixtureServer();
  ~FixtureServer();
  void add(const std::string& path, std::string body, std::string content_type, int status = 200);
  void redirect(const std::string& path, const std::string& location);
  /// Responds after sleeping for the given milliseconds.
  void slow(const std::string& path, int delay_ms);
  std::string url(const std::string& path) const;
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Minimal HTTP client for service tests.
struct HttpReply {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;
};
HttpReply http_get(int port, const std::string& path);
HttpReply http_post(int port, const std::string& path, const std::string& body,
                    const std::string& content_type = "application/json");

/// Independent tree diff: node ids that changed or appeared without being
/// listed in any ledger entry (new nodes may sit under an injected node).
std::vector<phishgen::NodeId> unledgered_changes(const phishgen::Document& before, const phishgen::Document& after,
                                                 const std::vector<phishgen::FeatureApplication>& ledger);

}  // namespace fixtures
