// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace phishgen {

/// Generic URI components. Strings hold the raw (still percent-encoded)
/// text of each component; scheme and host are lower-cased.
struct Url {
  std::string scheme;
  bool has_authority = false;
  std::string userinfo;
  std::string host;
  std::string port;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;

  std::string to_string() const;
  /// scheme://host[:port]
  std::string origin() const;
  /// path plus "?query" when present; "/" when the path is empty.
  std::string path_and_query() const;
  bool is_http() const { return scheme == "http" || scheme == "https"; }

  friend bool operator==(const Url&, const Url&) = default;
};

/// Parses an absolute URL. Returns nullopt for relative references or
/// syntactically invalid input (http/https without a host, bad port,
/// control characters).
std::optional<Url> parse_absolute_url(std::string_view text);

/// True when text is an absolute http(s) URL with a host.
bool is_web_url(std::string_view text);

/// Resolves a raw reference (as found in an attribute) against an absolute
/// base. Handles scheme-relative, absolute-path, path-relative, query-only
/// and fragment-only references and removes dot segments.
/// Throws Error(malformed_reference) on unusable input.
std::string resolve_reference(std::string_view base, std::string_view raw);

/// Lower-cased extension of the last path segment ("png"), or "" if none.
std::string path_extension(std::string_view url_or_path);

/// Last path segment without extension ("logo" for ".../img/logo.png").
std::string path_stem(std::string_view url_or_path);

}  // namespace phishgen
