// SPDX-License-Identifier: Apache-2.0
#include "phishgen/url.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "phishgen/error.hpp"

namespace phishgen {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_scheme_char(char c, bool first) {
  const auto u = static_cast<unsigned char>(c);
  if (std::isalpha(u)) return true;
  if (first) return false;
  return std::isdigit(u) || c == '+' || c == '-' || c == '.';
}

// Splits a reference into RFC 3986 components without validating them.
struct RawParts {
  std::optional<std::string> scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

RawParts split(std::string_view s) {
  RawParts parts;
  std::size_t i = 0;
  // scheme
  for (std::size_t j = 0; j < s.size(); ++j) {
    const char c = s[j];
    if (c == ':') {
      if (j > 0) {
        parts.scheme = lower(s.substr(0, j));
        i = j + 1;
      }
      break;
    }
    if (!is_scheme_char(c, j == 0)) break;
  }
  if (s.substr(i).starts_with("//")) {
    const auto start = i + 2;
    auto end = s.find_first_of("/?#", start);
    if (end == std::string_view::npos) end = s.size();
    parts.authority = std::string(s.substr(start, end - start));
    i = end;
  }
  auto path_end = s.find_first_of("?#", i);
  if (path_end == std::string_view::npos) path_end = s.size();
  parts.path = std::string(s.substr(i, path_end - i));
  i = path_end;
  if (i < s.size() && s[i] == '?') {
    auto q_end = s.find('#', i);
    if (q_end == std::string_view::npos) q_end = s.size();
    parts.query = std::string(s.substr(i + 1, q_end - i - 1));
    i = q_end;
  }
  if (i < s.size() && s[i] == '#') parts.fragment = std::string(s.substr(i + 1));
  return parts;
}

bool split_authority(const std::string& authority, Url& url) {
  std::string_view rest = authority;
  if (const auto at = rest.rfind('@'); at != std::string_view::npos) {
    url.userinfo = std::string(rest.substr(0, at));
    rest = rest.substr(at + 1);
  }
  std::string_view host = rest;
  std::string_view port;
  if (!rest.empty() && rest.front() == '[') {
    const auto close = rest.find(']');
    if (close == std::string_view::npos) return false;
    host = rest.substr(0, close + 1);
    auto after = rest.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':') return false;
      port = after.substr(1);
    }
  } else if (const auto colon = rest.rfind(':'); colon != std::string_view::npos) {
    host = rest.substr(0, colon);
    port = rest.substr(colon + 1);
  }
  for (char c : port) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  if (port.size() > 5) return false;
  for (char c : host) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && !std::isalnum(u) && std::string_view("-._~%[]:!$&'()*+,;=").find(c) == std::string_view::npos)
      return false;
  }
  url.host = lower(host);
  url.port = std::string(port);
  return true;
}

// RFC 3986 5.2.4
std::string remove_dot_segments(std::string_view input) {
  std::vector<std::string_view> out;
  const bool absolute = input.starts_with('/');
  std::size_t i = absolute ? 1 : 0;
  bool trailing_slash = false;
  while (i <= input.size()) {
    auto end = input.find('/', i);
    if (end == std::string_view::npos) end = input.size();
    const auto seg = input.substr(i, end - i);
    const bool last = end == input.size();
    if (seg == ".") {
      trailing_slash = last;
    } else if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing_slash = last;
    } else {
      out.push_back(seg);
      trailing_slash = false;
    }
    i = end + 1;
  }
  std::string result = absolute ? "/" : "";
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k > 0) result += '/';
    result += out[k];
  }
  if (trailing_slash && !result.ends_with('/')) result += '/';
  return result;
}

std::string merge_paths(const Url& base, std::string_view ref_path) {
  if (base.has_authority && base.path.empty()) return "/" + std::string(ref_path);
  const auto slash = base.path.rfind('/');
  if (slash == std::string::npos) return std::string(ref_path);
  return base.path.substr(0, slash + 1) + std::string(ref_path);
}

// Browsers strip leading/trailing C0-or-space and drop embedded tab/newline.
std::string clean_reference(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && static_cast<unsigned char>(raw[b]) <= 0x20) ++b;
  while (e > b && static_cast<unsigned char>(raw[e - 1]) <= 0x20) --e;
  std::string out;
  out.reserve(e - b);
  for (auto c : raw.substr(b, e - b)) {
    if (c == '\t' || c == '\n' || c == '\r') continue;
    if (c == ' ') {
      out += "%20";
      continue;
    }
    out += c;
  }
  return out;
}

bool has_control_chars(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x20 || u == 0x7f;
  });
}

}  // namespace

std::string Url::to_string() const {
  std::string out = scheme + ":";
  if (has_authority) {
    out += "//";
    if (!userinfo.empty()) out += userinfo + "@";
    out += host;
    if (!port.empty()) out += ":" + port;
  }
  out += path;
  if (query) out += "?" + *query;
  if (fragment) out += "#" + *fragment;
  return out;
}

std::string Url::origin() const {
  std::string out = scheme + "://" + host;
  if (!port.empty()) out += ":" + port;
  return out;
}

std::string Url::path_and_query() const {
  std::string out = path.empty() ? "/" : path;
  if (query) out += "?" + *query;
  return out;
}

std::optional<Url> parse_absolute_url(std::string_view text) {
  if (text.empty() || has_control_chars(text) || text.find(' ') != std::string_view::npos)
    return std::nullopt;
  auto parts = split(text);
  if (!parts.scheme) return std::nullopt;
  Url url;
  url.scheme = *parts.scheme;
  if (parts.authority) {
    url.has_authority = true;
    if (!split_authority(*parts.authority, url)) return std::nullopt;
  }
  url.path = std::move(parts.path);
  url.query = std::move(parts.query);
  url.fragment = std::move(parts.fragment);
  if (url.is_http() && (!url.has_authority || url.host.empty())) return std::nullopt;
  return url;
}

bool is_web_url(std::string_view text) {
  const auto url = parse_absolute_url(text);
  return url && url->is_http();
}

std::string resolve_reference(std::string_view base_text, std::string_view raw) {
  const auto base = parse_absolute_url(base_text);
  if (!base) throw Error(ErrorCode::malformed_reference, "invalid base URL: " + std::string(base_text));
  const std::string ref_text = clean_reference(raw);
  if (has_control_chars(ref_text))
    throw Error(ErrorCode::malformed_reference, "control characters in reference");
  auto ref = split(ref_text);

  Url target;
  if (ref.scheme && !(*ref.scheme == base->scheme && base->is_http() && !ref.authority)) {
    auto parsed = parse_absolute_url(ref_text);
    if (!parsed) throw Error(ErrorCode::malformed_reference, "malformed reference: " + std::string(raw));
    if (parsed->has_authority) parsed->path = remove_dot_segments(parsed->path);
    return parsed->to_string();
  }
  // "http:foo" against an http base is treated as relative, as browsers do.
  if (ref.scheme) ref.scheme.reset();

  target.scheme = base->scheme;
  if (ref.authority) {
    target.has_authority = true;
    if (!split_authority(*ref.authority, target))
      throw Error(ErrorCode::malformed_reference, "malformed authority: " + std::string(raw));
    target.path = remove_dot_segments(ref.path);
    target.query = ref.query;
  } else {
    target.has_authority = base->has_authority;
    target.userinfo = base->userinfo;
    target.host = base->host;
    target.port = base->port;
    if (ref.path.empty()) {
      target.path = base->path;
      target.query = ref.query ? ref.query : base->query;
    } else {
      target.path = ref.path.starts_with('/') ? remove_dot_segments(ref.path)
                                              : remove_dot_segments(merge_paths(*base, ref.path));
      target.query = ref.query;
    }
  }
  target.fragment = ref.fragment;
  if (target.is_http() && target.host.empty())
    throw Error(ErrorCode::malformed_reference, "reference resolves without host: " + std::string(raw));
  if (target.is_http() && target.path.empty()) target.path = "/";
  return target.to_string();
}

std::string path_extension(std::string_view url_or_path) {
  auto end = url_or_path.find_first_of("?#");
  auto path = url_or_path.substr(0, end);
  const auto slash = path.rfind('/');
  if (slash != std::string_view::npos) path = path.substr(slash + 1);
  const auto dot = path.rfind('.');
  if (dot == std::string_view::npos || dot + 1 == path.size()) return {};
  return lower(path.substr(dot + 1));
}

std::string path_stem(std::string_view url_or_path) {
  auto end = url_or_path.find_first_of("?#");
  auto path = url_or_path.substr(0, end);
  const auto slash = path.rfind('/');
  if (slash != std::string_view::npos) path = path.substr(slash + 1);
  const auto dot = path.rfind('.');
  return std::string(path.substr(0, dot));
}

}  // namespace phishgen
