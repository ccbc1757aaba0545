// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "phishgen/snapshot.hpp"

namespace phishgen {

struct FetchPolicy {
  double timeout_s = 20;
  std::size_t max_asset_bytes = 8u << 20;
  std::size_t max_assets = 256;
  std::string user_agent = "phishgen/1.0 (research; +local)";
  bool follow_redirects = true;

  /// Throws Error(invalid_argument) unless every numeric field is > 0.
  void validate() const;
};

struct FetchedResource {
  std::string bytes;
  std::string content_type;
};

/// Fetches one asset. Returns nullopt (or throws) when it cannot be loaded.
/// Called from several threads at once.
using ResourceLoader = std::function<std::optional<FetchedResource>(const std::string& url)>;

/// GET over HTTP(S) honouring the policy; nullopt on any failure or a body
/// above max_asset_bytes.
ResourceLoader http_loader(const FetchPolicy& policy);

/// Serves URLs below the directory of base_url from files in dir; anything
/// else goes to fallback (or fails when there is none).
ResourceLoader directory_loader(const std::string& base_url, const std::filesystem::path& dir,
                                ResourceLoader fallback = {});

/// Downloads a landing page. Throws Error(invalid_argument) for non-http(s)
/// URLs, Error(network_unreachable), Error(http_status), Error(not_html) or
/// Error(timeout).
WebpageSnapshot fetch_page(const std::string& url, const FetchPolicy& policy);

/// Builds a snapshot from markup already at hand (a saved page). Bytes are
/// transcoded to UTF-8 using the declared charset.
WebpageSnapshot snapshot_from_markup(std::string markup, const std::string& origin_url, std::int64_t fetched_at,
                                     std::string_view header_content_type = {});

/// Downloads stylesheets, scripts and images referenced by the markup (and
/// url()/@import inside stylesheets), stores them under
/// assets/<hash>.<ext> and rewrites the references. Never throws for
/// individual asset failures; they leave the reference as written and make
/// the snapshot partial.
WebpageSnapshot localize_assets(const WebpageSnapshot& snapshot, const FetchPolicy& policy);
WebpageSnapshot localize_assets(const WebpageSnapshot& snapshot, const FetchPolicy& policy,
                                const ResourceLoader& loader);

/// Charset declared by a <meta> tag in the first 1024 bytes, lower-cased.
std::optional<std::string> sniff_meta_charset(std::string_view markup);
/// Converts markup to UTF-8 from charset (meta first, then header) and
/// rewrites the declaration. UTF-8/ASCII input is returned unchanged.
std::string normalize_encoding(std::string markup, std::string_view header_content_type);

}  // namespace phishgen
