// SPDX-License-Identifier: Apache-2.0
#include "phishgen/spoof.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "phishgen/error.hpp"
#include "phishgen/url.hpp"

namespace phishgen {
namespace {

// Multi-label public suffixes we recognise; everything else is one label.
constexpr std::array<std::string_view, 20> kTwoPartSuffixes = {
    "co.uk", "org.uk", "ac.uk", "gov.uk", "me.uk",  "com.au", "net.au", "org.au", "co.jp",  "ne.jp",
    "co.in", "com.br", "co.nz", "com.cn", "com.mx", "co.za",  "com.tr", "co.kr",  "com.sg", "com.hk"};

bool domain_chars(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.';
  });
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

struct HomoglyphCandidate {
  std::size_t offset;  // within the label
  std::string key;
  std::string replacement;
};

}  // namespace

std::string_view to_string(EditKind kind) noexcept {
  switch (kind) {
    case EditKind::homoglyph: return "homoglyph";
    case EditKind::prefix: return "prefix";
    case EditKind::suffix: return "suffix";
    case EditKind::tld_swap: return "tld_swap";
  }
  return "homoglyph";
}

void SpoofRuleSet::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::invalid_argument, "spoof rules: " + what); };
  for (const auto& [key, reps] : homoglyphs) {
    if (key.empty() || !domain_chars(key) || key.find('.') != std::string::npos) bad("bad homoglyph key '" + key + "'");
    for (const auto& r : reps) {
      if (r == key) bad("homoglyph replacement equals its key '" + key + "'");
      if (r.empty() || !domain_chars(r) || r.find('.') != std::string::npos) bad("bad replacement '" + r + "'");
    }
  }
  for (const auto& p : prefixes) {
    if (p.size() < 2 || p.back() != '-' || p.front() == '-' || !domain_chars(p) || p.find('.') != std::string::npos)
      bad("prefix must end with '-': '" + p + "'");
  }
  for (const auto& s : suffixes) {
    if (s.size() < 2 || s.front() != '-' || s.back() == '-' || !domain_chars(s) || s.find('.') != std::string::npos)
      bad("suffix must start with '-': '" + s + "'");
  }
  for (const auto& t : tld_swaps) {
    if (t.empty() || !domain_chars(t) || t.front() == '.' || t.back() == '.' || t.front() == '-')
      bad("bad tld '" + t + "'");
  }
}

SpoofRuleSet default_spoof_rules() {
  // Mirrors data/spoof_rules.tsv.
  SpoofRuleSet r;
  r.homoglyphs = {{"d", {"cl"}}, {"m", {"nn", "rn"}}, {"w", {"vv"}}, {"l", {"1"}},
                  {"c", {"o"}},  {"o", {"c", "0"}},   {"i", {"l"}}};
  r.prefixes = {"secure-", "logon-", "login-"};
  r.suffixes = {"-login", "-logon", "-secure"};
  r.tld_swaps = {"co", "net", "info"};
  return r;
}

SpoofRuleSet parse_spoof_rules(std::string_view text) {
  SpoofRuleSet r;
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t k = 0;
    while (true) {
      auto tab = line.find('\t', k);
      fields.push_back(line.substr(k, tab == std::string::npos ? std::string::npos : tab - k));
      if (tab == std::string::npos) break;
      k = tab + 1;
    }
    if (fields.size() != 3) throw Error(ErrorCode::parse_error, "spoof rules line " + std::to_string(line_no) + ": expected 3 fields");
    const auto& kind = fields[0];
    if (kind == "homoglyph") {
      auto it = std::find_if(r.homoglyphs.begin(), r.homoglyphs.end(), [&](const auto& e) { return e.first == fields[1]; });
      if (it == r.homoglyphs.end()) {
        r.homoglyphs.push_back({fields[1], {fields[2]}});
      } else {
        it->second.push_back(fields[2]);
      }
    } else if (kind == "prefix") {
      r.prefixes.push_back(fields[2]);
    } else if (kind == "suffix") {
      r.suffixes.push_back(fields[2]);
    } else if (kind == "tld") {
      r.tld_swaps.push_back(fields[2]);
    } else {
      throw Error(ErrorCode::parse_error, "spoof rules line " + std::to_string(line_no) + ": unknown kind '" + kind + "'");
    }
  }
  r.validate();
  return r;
}

SpoofRuleSet load_spoof_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spoof_rules(ss.str());
}

nlohmann::json to_json(const SpoofResult& result) {
  nlohmann::json edits = nlohmann::json::array();
  for (const auto& e : result.edits)
    edits.push_back({{"kind", to_string(e.kind)}, {"position", e.position}, {"before", e.before}, {"after", e.after}});
  return {{"original_domain", result.original_domain},
          {"spoofed_domain", result.spoofed_domain},
          {"edits", std::move(edits)}};
}

DomainParts split_domain(std::string_view domain) {
  std::string d = lower(domain);
  if (!d.empty() && d.back() == '.') d.pop_back();
  if (d.empty() || !domain_chars(d) || d.find("..") != std::string::npos || d.front() == '.')
    throw Error(ErrorCode::invalid_argument, "not a domain name: '" + std::string(domain) + "'");
  const auto last = d.rfind('.');
  if (last == std::string::npos) throw Error(ErrorCode::invalid_argument, "domain has no TLD: '" + d + "'");
  std::size_t suffix_start = last + 1;
  for (auto s : kTwoPartSuffixes) {
    if (d.size() > s.size() + 1 && d.ends_with(s) && d[d.size() - s.size() - 1] == '.') {
      suffix_start = d.size() - s.size();
      break;
    }
  }
  const std::string suffix = d.substr(suffix_start);
  if (std::all_of(suffix.begin(), suffix.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw Error(ErrorCode::invalid_argument, "IP addresses cannot be spoofed: '" + d + "'");
  if (suffix_start < 2) throw Error(ErrorCode::invalid_argument, "domain has an empty label: '" + d + "'");
  const std::string head = d.substr(0, suffix_start - 1);
  const auto dot = head.rfind('.');
  DomainParts parts;
  parts.subdomains = dot == std::string::npos ? "" : head.substr(0, dot + 1);
  parts.label = dot == std::string::npos ? head : head.substr(dot + 1);
  parts.suffix = suffix;
  if (parts.label.empty()) throw Error(ErrorCode::invalid_argument, "domain has an empty label: '" + d + "'");
  return parts;
}

std::string replay_edits(std::string_view domain, const std::vector<SpoofEdit>& edits) {
  std::string d(domain);
  for (const auto& e : edits) {
    if (e.position > d.size() || d.compare(e.position, e.before.size(), e.before) != 0)
      throw Error(ErrorCode::invalid_argument, "edit does not match domain at position " + std::to_string(e.position));
    d.replace(e.position, e.before.size(), e.after);
  }
  return d;
}

SpoofResult spoof_domain(std::string_view domain, const SpoofRuleSet& rules, Rng& rng, int min_edits,
                         std::optional<int> max_edits) {
  if (min_edits < 1) throw Error(ErrorCode::invalid_argument, "min_edits must be positive");
  const int upper = max_edits.value_or(min_edits + 2);
  if (upper < min_edits) throw Error(ErrorCode::invalid_argument, "max_edits is below min_edits");
  rules.validate();
  const auto parts = split_domain(domain);
  SpoofResult result;
  result.original_domain = parts.subdomains + parts.label + "." + parts.suffix;

  std::string label = parts.label;
  std::vector<bool> original(label.size(), true);  // bytes not produced by an edit
  std::string suffix = parts.suffix;
  bool has_prefix = false, has_suffix = false, swapped = false;
  const std::size_t label_start = parts.subdomains.size();

  auto homoglyph_candidates = [&] {
    std::vector<HomoglyphCandidate> out;
    for (const auto& [key, reps] : rules.homoglyphs) {
      std::size_t pos = 0;
      while ((pos = label.find(key, pos)) != std::string::npos) {
        const bool untouched = std::all_of(original.begin() + static_cast<std::ptrdiff_t>(pos),
                                           original.begin() + static_cast<std::ptrdiff_t>(pos + key.size()),
                                           [](bool b) { return b; });
        if (untouched) {
          for (const auto& r : reps) out.push_back({pos, key, r});
          pos += key.size();
        } else {
          ++pos;
        }
      }
    }
    return out;
  };
  auto tld_choices = [&] {
    std::vector<std::string> out;
    if (swapped) return out;
    for (const auto& t : rules.tld_swaps) {
      if (t != suffix) out.push_back(t);
    }
    return out;
  };

  const auto target = rng.uniform_int(min_edits, upper);
  for (std::int64_t i = 0; i < target; ++i) {
    const auto glyphs = homoglyph_candidates();
    const auto tlds = tld_choices();
    std::vector<EditKind> kinds;
    if (!glyphs.empty()) kinds.push_back(EditKind::homoglyph);
    if (!has_prefix && !rules.prefixes.empty()) kinds.push_back(EditKind::prefix);
    if (!has_suffix && !rules.suffixes.empty()) kinds.push_back(EditKind::suffix);
    if (!tlds.empty()) kinds.push_back(EditKind::tld_swap);
    if (kinds.empty()) {
      if (static_cast<int>(result.edits.size()) >= min_edits) break;
      throw Error(ErrorCode::no_applicable_rule, "no spoofing rule applies to '" + result.original_domain + "'");
    }
    SpoofEdit edit;
    edit.kind = rng.pick(kinds);
    switch (edit.kind) {
      case EditKind::homoglyph: {
        const auto& c = rng.pick(glyphs);
        edit.position = label_start + c.offset;
        edit.before = c.key;
        edit.after = c.replacement;
        label.replace(c.offset, c.key.size(), c.replacement);
        original.erase(original.begin() + static_cast<std::ptrdiff_t>(c.offset),
                       original.begin() + static_cast<std::ptrdiff_t>(c.offset + c.key.size()));
        original.insert(original.begin() + static_cast<std::ptrdiff_t>(c.offset), c.replacement.size(), false);
        break;
      }
      case EditKind::prefix: {
        edit.position = label_start;
        edit.after = rng.pick(rules.prefixes);
        label.insert(0, edit.after);
        original.insert(original.begin(), edit.after.size(), false);
        has_prefix = true;
        break;
      }
      case EditKind::suffix: {
        edit.position = label_start + label.size();
        edit.after = rng.pick(rules.suffixes);
        label += edit.after;
        original.insert(original.end(), edit.after.size(), false);
        has_suffix = true;
        break;
      }
      case EditKind::tld_swap: {
        edit.position = label_start + label.size() + 1;
        edit.before = suffix;
        edit.after = rng.pick(tlds);
        suffix = edit.after;
        swapped = true;
        break;
      }
    }
    result.edits.push_back(std::move(edit));
  }
  result.spoofed_domain = parts.subdomains + label + "." + suffix;
  return result;
}

std::string spoof_url(std::string_view url, const SpoofRuleSet& rules, Rng& rng, int min_edits, SpoofResult* result) {
  const auto parsed = parse_absolute_url(url);
  if (!parsed || !parsed->has_authority || parsed->host.empty())
    throw Error(ErrorCode::invalid_argument, "not an absolute URL with a host: " + std::string(url));
  // Locate the raw host text: after "scheme://" and any userinfo.
  std::size_t host_start = url.find("//") + 2;
  const auto authority_end = url.find_first_of("/?#", host_start);
  const auto at = url.substr(0, authority_end).rfind('@');
  if (at != std::string_view::npos && at >= host_start) host_start = at + 1;
  auto spoofed = spoof_domain(parsed->host, rules, rng, min_edits);
  std::string out(url.substr(0, host_start));
  out += spoofed.spoofed_domain;
  out += url.substr(host_start + parsed->host.size());
  if (result) *result = std::move(spoofed);
  return out;
}

}  // namespace phishgen
