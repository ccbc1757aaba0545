// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "phishgen/fetcher.hpp"

namespace phishgen {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  /// 0 picks a free port.
  int port = 8080;
  /// Required for any address other than loopback.
  bool allow_remote = false;
  /// Session data (snapshots, bundles, capture logs) lives under here.
  std::filesystem::path sandbox_dir = "phishgen-sessions";
  /// Static UI files served at "/", if any.
  std::optional<std::filesystem::path> ui_dir;
  /// Access-Control-Allow-Origin for a UI served from elsewhere.
  std::optional<std::string> cors_origin;
  /// Stamp a visible banner into served HTML pages.
  bool banner = true;
  std::chrono::seconds session_ttl{3600};
  std::size_t max_capture_bytes = 1 << 20;
  FetchPolicy fetch_policy;
  /// Test hook; defaults to steady_clock::now.
  std::function<std::chrono::steady_clock::time_point()> clock;
};

bool is_loopback_host(std::string_view host);

/// Banner markup inserted right after <body> (or prepended when absent).
std::string inject_banner(std::string_view html);

/// HTTP API over the pipeline:
///   GET  /features
///   POST /analyze                      {url}
///   POST /generate                     {session_id, features | random, seed?, params?}
///   GET  /bundles/<session>/<bundle>/<path>
///   POST /bundles/<session>/<bundle>/<capture path>
class Service {
 public:
  /// Throws Error(invalid_argument) for a non-loopback host without
  /// allow_remote.
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the listening socket and returns the port. Throws Error(io_error).
  int bind();
  /// Serves until stop(); binds first if needed.
  void run();
  /// run() on a background thread; returns once the socket is bound.
  int start();
  void stop();

  const ServiceConfig& config() const noexcept;
  int port() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace phishgen
