// SPDX-License-Identifier: Apache-2.0
#include "phishgen/fetcher.hpp"

#include <iconv.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "phishgen/error.hpp"
#include "phishgen/html.hpp"
#include "phishgen/rng.hpp"
#include "phishgen/url.hpp"

namespace phishgen {
namespace {

namespace fs = std::filesystem;

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::optional<std::string> charset_from_content_type(std::string_view content_type) {
  const auto l = lower(content_type);
  const auto pos = l.find("charset=");
  if (pos == std::string::npos) return std::nullopt;
  auto v = l.substr(pos + 8);
  const auto end = v.find_first_of("; ");
  v = v.substr(0, end);
  v.erase(std::remove(v.begin(), v.end(), '"'), v.end());
  if (v.empty()) return std::nullopt;
  return v;
}

bool is_utf8_name(std::string_view cs) { return cs == "utf-8" || cs == "utf8" || cs == "us-ascii" || cs == "ascii"; }

std::string transcode(const std::string& in, const std::string& from) {
  iconv_t cd = iconv_open("UTF-8", from.c_str());
  if (cd == reinterpret_cast<iconv_t>(-1)) return in;  // unknown charset: keep bytes
  std::string out;
  out.resize(in.size() * 4 + 16);
  char* src = const_cast<char*>(in.data());
  std::size_t src_left = in.size();
  char* dst = out.data();
  std::size_t dst_left = out.size();
  while (src_left > 0) {
    if (iconv(cd, &src, &src_left, &dst, &dst_left) == static_cast<std::size_t>(-1)) {
      if (errno == EILSEQ || errno == EINVAL) {
        // Replace the offending byte with U+FFFD and carry on.
        ++src;
        --src_left;
        if (dst_left < 3) break;
        *dst++ = '\xEF';
        *dst++ = '\xBF';
        *dst++ = '\xBD';
        dst_left -= 3;
      } else {
        break;
      }
    }
  }
  iconv_close(cd);
  out.resize(out.size() - dst_left);
  return out;
}

bool looks_non_html(std::string_view body) {
  if (looks_binary(body)) return true;
  static constexpr std::string_view magics[] = {"\x89PNG", "GIF8", "\xFF\xD8\xFF", "%PDF", "PK\x03\x04"};
  return std::any_of(std::begin(magics), std::end(magics), [&](std::string_view m) { return body.starts_with(m); });
}

std::string hex16(std::uint64_t v) { return fmt::format("{:016x}", v); }

AssetKind kind_for_extension(std::string_view ext) {
  if (ext == "css") return AssetKind::stylesheet;
  if (ext == "js" || ext == "mjs") return AssetKind::script;
  if (ext == "png" || ext == "jpg" || ext == "jpeg" || ext == "gif" || ext == "svg" || ext == "webp" ||
      ext == "ico" || ext == "bmp" || ext == "avif")
    return AssetKind::image;
  if (ext == "woff" || ext == "woff2" || ext == "ttf" || ext == "otf" || ext == "eot") return AssetKind::font;
  return AssetKind::other;
}

std::string default_extension(AssetKind kind) {
  switch (kind) {
    case AssetKind::stylesheet: return "css";
    case AssetKind::script: return "js";
    case AssetKind::image: return "img";
    case AssetKind::font: return "font";
    case AssetKind::other: return "bin";
  }
  return "bin";
}

bool safe_extension(std::string_view ext) {
  return !ext.empty() && ext.size() <= 8 &&
         std::all_of(ext.begin(), ext.end(), [](unsigned char c) { return std::isalnum(c); });
}

// Extension from the URL, then the content type, then the reference kind.
std::string choose_extension(const std::string& url, const std::string& content_type, AssetKind kind) {
  auto ext = path_extension(url);
  if (ext == "jpeg") ext = "jpg";
  if (safe_extension(ext)) return ext;
  ext = extension_for_content_type(content_type);
  if (!ext.empty()) return ext;
  return default_extension(kind);
}

// A raw reference worth downloading: not empty, inline or in-page.
bool localizable(std::string_view raw) {
  const auto t = lower(trim(raw));
  return !t.empty() && !t.starts_with("data:") && !t.starts_with("javascript:") && !t.starts_with("#") &&
         !t.starts_with("mailto:") && !t.starts_with("about:") && !t.starts_with("blob:");
}

struct CssRef {
  std::size_t begin, end;  // span of the URL text inside the stylesheet
  std::string raw;
};

// url(...) tokens and @import strings, in order.
std::vector<CssRef> css_references(std::string_view css) {
  std::vector<CssRef> out;
  std::size_t i = 0;
  const auto l = lower(css);
  while (i < css.size()) {
    const auto u = l.find("url(", i);
    const auto imp = l.find("@import", i);
    if (u == std::string::npos && imp == std::string::npos) break;
    if (imp != std::string::npos && (u == std::string::npos || imp < u)) {
      std::size_t k = imp + 7;
      while (k < css.size() && std::isspace(static_cast<unsigned char>(css[k]))) ++k;
      if (k < css.size() && (css[k] == '"' || css[k] == '\'')) {
        const char q = css[k];
        const auto close = css.find(q, k + 1);
        if (close == std::string_view::npos) break;
        out.push_back({k + 1, close, std::string(css.substr(k + 1, close - k - 1))});
        i = close + 1;
      } else {
        i = k;  // "@import url(...)" is picked up by the url( branch
      }
      continue;
    }
    std::size_t k = u + 4;
    while (k < css.size() && std::isspace(static_cast<unsigned char>(css[k]))) ++k;
    if (k < css.size() && (css[k] == '"' || css[k] == '\'')) {
      const char q = css[k];
      const auto close = css.find(q, k + 1);
      if (close == std::string_view::npos) break;
      out.push_back({k + 1, close, std::string(css.substr(k + 1, close - k - 1))});
      i = close + 1;
    } else {
      const auto close = css.find(')', k);
      if (close == std::string_view::npos) break;
      std::size_t e = close;
      while (e > k && std::isspace(static_cast<unsigned char>(css[e - 1]))) --e;
      out.push_back({k, e, std::string(css.substr(k, e - k))});
      i = close + 1;
    }
  }
  return out;
}

std::vector<std::string> srcset_urls(std::string_view srcset) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < srcset.size()) {
    while (i < srcset.size() && (std::isspace(static_cast<unsigned char>(srcset[i])) || srcset[i] == ',')) ++i;
    std::size_t e = i;
    while (e < srcset.size() && !std::isspace(static_cast<unsigned char>(srcset[e]))) ++e;
    if (e > i) {
      std::string url(srcset.substr(i, e - i));
      // A trailing comma belongs to the separator, not the URL.
      while (!url.empty() && url.back() == ',') url.pop_back();
      if (!url.empty()) out.push_back(url);
    }
    while (e < srcset.size() && srcset[e] != ',') ++e;
    i = e + 1;
  }
  return out;
}

std::string rewrite_srcset(std::string_view srcset, const std::map<std::string, std::string>& replacements) {
  std::string out;
  std::size_t i = 0;
  while (i < srcset.size()) {
    std::size_t s = i;
    while (s < srcset.size() && (std::isspace(static_cast<unsigned char>(srcset[s])) || srcset[s] == ',')) ++s;
    out.append(srcset.substr(i, s - i));
    std::size_t e = s;
    while (e < srcset.size() && !std::isspace(static_cast<unsigned char>(srcset[e])) && srcset[e] != ',') ++e;
    const std::string url(srcset.substr(s, e - s));
    auto it = replacements.find(url);
    out += it != replacements.end() ? it->second : url;
    std::size_t next = e;
    while (next < srcset.size() && srcset[next] != ',') ++next;
    out.append(srcset.substr(e, next - e));
    i = next;
    if (i < srcset.size()) {
      out += ',';
      ++i;
    }
  }
  return out;
}

class Downloader {
 public:
  Downloader(const FetchPolicy& policy, const ResourceLoader& loader) : policy_(policy), loader_(loader) {}

  // Loads every URL (deduplicated) with a small pool of threads.
  std::map<std::string, std::optional<FetchedResource>> load(const std::vector<std::string>& urls) {
    std::vector<std::string> todo;
    std::set<std::string> seen;
    for (const auto& u : urls) {
      if (seen.insert(u).second) todo.push_back(u);
    }
    std::vector<std::optional<FetchedResource>> results(todo.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < todo.size(); i = next++) {
        try {
          auto r = loader_(todo[i]);
          if (r && !r->bytes.empty() && r->bytes.size() <= policy_.max_asset_bytes) results[i] = std::move(r);
        } catch (const std::exception&) {
        }
      }
    };
    const std::size_t n = std::min<std::size_t>(8, todo.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
    if (n > 0) worker();
    for (auto& t : pool) t.join();
    std::map<std::string, std::optional<FetchedResource>> out;
    for (std::size_t i = 0; i < todo.size(); ++i) out.emplace(todo[i], std::move(results[i]));
    return out;
  }

 private:
  const FetchPolicy& policy_;
  const ResourceLoader& loader_;
};

std::string asset_path_for(const std::string& url, const std::string& bytes, const std::string& content_type,
                           AssetKind kind) {
  const auto h = fnv1a64(bytes, fnv1a64(url));
  return "assets/" + hex16(h) + "." + choose_extension(url, content_type, kind);
}

std::string resolve_or_empty(const std::string& base, std::string_view raw) {
  try {
    auto abs = resolve_reference(base, trim(raw));
    // Fragments never change what is downloaded.
    if (auto hash = abs.find('#'); hash != std::string::npos) abs.resize(hash);
    return is_web_url(abs) ? abs : std::string();
  } catch (const Error&) {
    return {};
  }
}

}  // namespace

void FetchPolicy::validate() const {
  if (!(timeout_s > 0) || max_asset_bytes == 0 || max_assets == 0)
    throw Error(ErrorCode::invalid_argument, "fetch policy: timeout, max_asset_bytes and max_assets must be > 0");
}

std::optional<std::string> sniff_meta_charset(std::string_view markup) {
  const auto head = lower(markup.substr(0, std::min<std::size_t>(markup.size(), 1024)));
  std::size_t pos = 0;
  while ((pos = head.find("<meta", pos)) != std::string::npos) {
    const auto end = head.find('>', pos);
    const auto tag = head.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    pos += 5;
    auto cs = tag.find("charset=");
    if (cs == std::string::npos) continue;
    cs += 8;
    while (cs < tag.size() && (tag[cs] == '"' || tag[cs] == '\'' || std::isspace(static_cast<unsigned char>(tag[cs]))))
      ++cs;
    std::size_t e = cs;
    while (e < tag.size() && (std::isalnum(static_cast<unsigned char>(tag[e])) || tag[e] == '-' || tag[e] == '_' ||
                              tag[e] == ':' || tag[e] == '.'))
      ++e;
    if (e > cs) return tag.substr(cs, e - cs);
  }
  return std::nullopt;
}

std::string normalize_encoding(std::string markup, std::string_view header_content_type) {
  if (markup.starts_with("\xEF\xBB\xBF")) markup.erase(0, 3);
  auto charset = sniff_meta_charset(markup);
  if (!charset) charset = charset_from_content_type(header_content_type);
  if (!charset || is_utf8_name(*charset)) return markup;
  auto out = transcode(markup, *charset);
  // Point the declaration at the new encoding.
  const auto head = lower(out.substr(0, std::min<std::size_t>(out.size(), 2048)));
  const auto at = head.find(*charset, head.find("charset"));
  if (at != std::string::npos) out.replace(at, charset->size(), "utf-8");
  return out;
}

WebpageSnapshot snapshot_from_markup(std::string markup, const std::string& origin_url, std::int64_t fetched_at,
                                     std::string_view header_content_type) {
  if (!is_web_url(origin_url)) throw Error(ErrorCode::invalid_argument, "origin URL must be absolute http(s): " + origin_url);
  if (markup.empty()) throw Error(ErrorCode::invalid_argument, "empty page");
  if (looks_non_html(markup)) throw Error(ErrorCode::not_html, "input is not HTML");
  WebpageSnapshot s;
  s.origin_url = origin_url;
  s.markup = normalize_encoding(std::move(markup), header_content_type);
  s.fetched_at = fetched_at;
  return s;
}

WebpageSnapshot fetch_page(const std::string& url, const FetchPolicy& policy) {
  policy.validate();
  const auto parsed = parse_absolute_url(url);
  if (!parsed || !parsed->is_http() || parsed->host.empty())
    throw Error(ErrorCode::invalid_argument, "not an absolute http(s) URL: " + url);
  httplib::Client client(parsed->origin());
  const auto secs = static_cast<time_t>(policy.timeout_s);
  const auto usecs = static_cast<time_t>((policy.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_follow_location(policy.follow_redirects);
  const httplib::Headers headers = {{"User-Agent", policy.user_agent},
                                    {"Accept", "text/html,application/xhtml+xml;q=0.9,*/*;q=0.5"}};
  const auto started = std::chrono::steady_clock::now();
  auto res = client.Get(parsed->path_and_query(), headers);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && elapsed >= policy.timeout_s * 0.9))
      throw Error(ErrorCode::timeout, "timed out fetching " + url);
    throw Error(ErrorCode::network_unreachable, "cannot fetch " + url + ": " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300)
    throw Error(ErrorCode::http_status, fmt::format("HTTP {} for {}", res->status, url));
  if (looks_non_html(res->body)) throw Error(ErrorCode::not_html, "response is not HTML: " + url);
  std::string origin = url;
  if (!res->location.empty()) {
    try {
      const auto moved = resolve_reference(url, res->location);
      if (is_web_url(moved)) origin = moved;
    } catch (const Error&) {
    }
  }
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  return snapshot_from_markup(std::move(res->body), origin, now, res->get_header_value("Content-Type"));
}

ResourceLoader http_loader(const FetchPolicy& policy) {
  return [policy](const std::string& url) -> std::optional<FetchedResource> {
    const auto parsed = parse_absolute_url(url);
    if (!parsed || !parsed->is_http()) return std::nullopt;
    httplib::Client client(parsed->origin());
    const auto secs = static_cast<time_t>(policy.timeout_s);
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_follow_location(policy.follow_redirects);
    std::string body;
    bool too_big = false;
    auto res = client.Get(parsed->path_and_query(), httplib::Headers{{"User-Agent", policy.user_agent}},
                          [&](const char* data, std::size_t len) {
                            if (body.size() + len > policy.max_asset_bytes) {
                              too_big = true;
                              return false;
                            }
                            body.append(data, len);
                            return true;
                          });
    if (!res || too_big || res->status < 200 || res->status >= 300) return std::nullopt;
    return FetchedResource{std::move(body), res->get_header_value("Content-Type")};
  };
}

ResourceLoader directory_loader(const std::string& base_url, const fs::path& dir, ResourceLoader fallback) {
  std::string prefix = base_url;
  if (auto q = prefix.find_first_of("?#"); q != std::string::npos) prefix.resize(q);
  prefix.resize(prefix.rfind('/') + 1);
  return [prefix, dir, fallback](const std::string& url) -> std::optional<FetchedResource> {
    if (url.starts_with(prefix)) {
      std::string rel = url.substr(prefix.size());
      if (auto q = rel.find_first_of("?#"); q != std::string::npos) rel.resize(q);
      if (!is_safe_relative_path(rel)) return std::nullopt;
      std::ifstream in(dir / rel, std::ios::binary);
      if (!in) return std::nullopt;
      std::ostringstream ss;
      ss << in.rdbuf();
      return FetchedResource{ss.str(), content_type_for_extension(path_extension(rel))};
    }
    if (fallback) return fallback(url);
    return std::nullopt;
  };
}

WebpageSnapshot localize_assets(const WebpageSnapshot& snapshot, const FetchPolicy& policy) {
  return localize_assets(snapshot, policy, http_loader(policy));
}

WebpageSnapshot localize_assets(const WebpageSnapshot& snapshot, const FetchPolicy& policy,
                                const ResourceLoader& loader) {
  policy.validate();
  WebpageSnapshot out = snapshot;
  Document doc = parse_document(snapshot.markup);
  bool mutated = false;

  // <base> decides resolution, then goes away so local paths stay local.
  std::string base = snapshot.origin_url;
  for (auto* b : doc.elements("base")) {
    if (const auto* href = b->attribute("href")) {
      const auto resolved = resolve_or_empty(snapshot.origin_url, *href);
      if (!resolved.empty() && base == snapshot.origin_url) base = resolved;
    }
  }
  for (auto* b : doc.elements("base")) {
    b->parent()->remove_child(b->index_in_parent());
    mutated = true;
  }
  // Strip CSP and SRI so rewritten local assets still load.
  for (auto* m : doc.elements("meta")) {
    const auto* equiv = m->attribute("http-equiv");
    if (equiv && lower(*equiv).starts_with("content-security-policy")) {
      m->parent()->remove_child(m->index_in_parent());
      mutated = true;
    }
  }
  for (auto* el : doc.all_elements()) {
    if (el->remove_attribute("integrity")) mutated = true;
  }

  struct Site {
    Node* node;
    std::string attr;
    bool srcset;
    AssetKind kind;
  };
  std::vector<Site> sites;
  doc.visit([&](Node& n) {
    if (!n.is_element()) return;
    if (n.is_element("link")) {
      const auto rel = lower(n.attribute("rel") ? *n.attribute("rel") : "");
      if (rel.find("stylesheet") != std::string::npos) {
        sites.push_back({&n, "href", false, AssetKind::stylesheet});
      } else if (rel.find("icon") != std::string::npos) {
        sites.push_back({&n, "href", false, AssetKind::image});
      }
    } else if (n.is_element("script")) {
      sites.push_back({&n, "src", false, AssetKind::script});
    } else if (n.is_element("img") || n.is_element("source")) {
      sites.push_back({&n, "src", false, AssetKind::image});
      sites.push_back({&n, "srcset", true, AssetKind::image});
    }
  });

  // Collect absolute URLs in document order, honouring max_assets.
  std::vector<std::string> order;
  std::map<std::string, AssetKind> kinds;
  auto want = [&](const std::string& raw, AssetKind kind) {
    if (!localizable(raw) || out.assets.contains(trim(raw))) return;
    const auto abs = resolve_or_empty(base, raw);
    if (abs.empty() || kinds.contains(abs)) return;
    if (order.size() >= policy.max_assets) return;
    order.push_back(abs);
    kinds[abs] = kind;
  };
  for (const auto& s : sites) {
    const auto* v = s.node->attribute(s.attr);
    if (!v) continue;
    if (s.srcset) {
      for (const auto& u : srcset_urls(*v)) want(u, s.kind);
    } else {
      want(*v, s.kind);
    }
  }
  std::vector<Node*> style_blocks = doc.elements("style");
  for (auto* st : style_blocks) {
    for (const auto& c : st->children()) {
      if (!c->is_text()) continue;
      for (const auto& r : css_references(c->data())) want(r.raw, kind_for_extension(path_extension(r.raw)));
    }
  }

  Downloader downloader(policy, loader);
  auto fetched = downloader.load(order);

  // Second level: references inside downloaded stylesheets.
  std::vector<std::string> nested;
  for (const auto& url : order) {
    auto& res = fetched[url];
    if (!res || kinds[url] != AssetKind::stylesheet) continue;
    for (const auto& r : css_references(res->bytes)) {
      if (!localizable(r.raw)) continue;
      const auto abs = resolve_or_empty(url, r.raw);
      if (abs.empty() || kinds.contains(abs)) continue;
      if (order.size() + nested.size() >= policy.max_assets) break;
      kinds[abs] = kind_for_extension(path_extension(abs));
      nested.push_back(abs);
    }
  }
  for (auto& [url, res] : downloader.load(nested)) fetched[url] = std::move(res);

  // Paths are derived from the downloaded bytes before any rewriting.
  std::map<std::string, std::string> local;  // absolute url -> assets/... path
  bool partial = false;
  auto record = [&](const std::string& url) {
    const auto& res = fetched[url];
    AssetRecord rec;
    rec.original_url = url;
    rec.kind = kinds[url];
    if (res) {
      rec.bytes = res->bytes;
      rec.content_type = trim(res->content_type.substr(0, res->content_type.find(';')));
    }
    if (rec.content_type.empty()) rec.content_type = content_type_for_extension(path_extension(url));
    const auto path = asset_path_for(url, rec.bytes, rec.content_type, rec.kind);
    if (res) {
      local[url] = path;
    } else {
      partial = true;
    }
    out.assets.emplace(path, std::move(rec));
  };
  for (const auto& url : order) record(url);
  for (const auto& url : nested) record(url);

  // Rewrite url()s inside localized stylesheets: relative to the sheet
  // when localized, absolute otherwise.
  auto rewrite_css = [&](const std::string& css, const std::string& css_url, bool sheet) {
    std::string result;
    std::size_t cursor = 0;
    for (const auto& r : css_references(css)) {
      std::string replacement;
      if (localizable(r.raw) && !out.assets.contains(trim(r.raw))) {
        const auto abs = resolve_or_empty(css_url, r.raw);
        if (auto it = local.find(abs); it != local.end()) {
          replacement = sheet ? it->second.substr(std::string("assets/").size()) : it->second;
        } else if (!abs.empty() && sheet) {
          replacement = abs;
        }
      }
      if (replacement.empty() || replacement == r.raw) continue;
      result.append(css, cursor, r.begin - cursor);
      result += replacement;
      cursor = r.end;
    }
    if (cursor == 0) return css;
    result.append(css, cursor, std::string::npos);
    return result;
  };
  for (const auto& url : order) {
    if (kinds[url] != AssetKind::stylesheet || !local.contains(url)) continue;
    auto& rec = out.assets.at(local[url]);
    rec.bytes = rewrite_css(rec.bytes, url, true);
  }

  // Rewrite markup references.
  for (const auto& s : sites) {
    const auto* v = s.node->attribute(s.attr);
    if (!v) continue;
    if (s.srcset) {
      std::map<std::string, std::string> repl;
      for (const auto& u : srcset_urls(*v)) {
        if (auto it = local.find(resolve_or_empty(base, u)); it != local.end() && localizable(u)) repl[u] = it->second;
      }
      if (repl.empty()) continue;
      s.node->set_attribute(s.attr, rewrite_srcset(*v, repl));
      mutated = true;
    } else if (localizable(*v)) {
      if (auto it = local.find(resolve_or_empty(base, *v)); it != local.end()) {
        s.node->set_attribute(s.attr, it->second);
        mutated = true;
      }
    }
  }
  for (auto* st : style_blocks) {
    for (const auto& c : st->children()) {
      if (!c->is_text()) continue;
      auto text = rewrite_css(c->data(), base, false);
      if (text != c->data()) {
        c->set_data(std::move(text));
        mutated = true;
      }
    }
  }

  if (mutated) out.markup = serialize_document(doc);
  const bool any_missing = std::any_of(out.assets.begin(), out.assets.end(),
                                       [](const auto& e) { return e.second.missing(); });
  out.fetch_status = (partial || any_missing) ? FetchStatus::partial : FetchStatus::complete;
  return out;
}

}  // namespace phishgen
