// SPDX-License-Identifier: Apache-2.0
//
// Error-tolerant HTML tokenizer and a reduced tree builder. Covers the
// implied-end-tag rules that matter for real pages (p, li, dt/dd, option,
// table rows and cells, headings, nested anchors), raw-text and RCDATA
// elements, and self-closing syntax inside svg/math. Insertion modes,
// foster parenting and the full adoption agency are not implemented, and
// html/head/body are not synthesized.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <unordered_set>

#include "phishgen/error.hpp"
#include "phishgen/html.hpp"

namespace phishgen {
namespace {

struct NamedEntity {
  std::string_view name;
  std::string_view value;
};

constexpr std::array<NamedEntity, 40> kEntities{{
    {"amp", "&"},        {"lt", "<"},         {"gt", ">"},         {"quot", "\""},
    {"apos", "'"},       {"nbsp", "\xC2\xA0"},  {"copy", "©"},  {"reg", "®"},
    {"trade", "™"}, {"hellip", "…"}, {"mdash", "—"}, {"ndash", "–"},
    {"lsquo", "‘"}, {"rsquo", "’"}, {"ldquo", "“"}, {"rdquo", "”"},
    {"laquo", "«"}, {"raquo", "»"}, {"middot", "·"}, {"bull", "•"},
    {"euro", "€"},  {"pound", "£"}, {"yen", "¥"},   {"cent", "¢"},
    {"times", "×"}, {"divide", "÷"}, {"deg", "°"},  {"para", "¶"},
    {"sect", "§"},  {"shy", "\xC2\xAD"},   {"zwnj", "\xE2\x80\x8C"},  {"zwj", "\xE2\x80\x8D"},
    {"ensp", "\xE2\x80\x82"},  {"emsp", "\xE2\x80\x83"},  {"thinsp", "\xE2\x80\x89"}, {"larr", "←"},
    {"rarr", "→"},  {"uarr", "↑"},  {"darr", "↓"},  {"check", "✓"},
}};

// Latin-1 letters, U+00C0 onwards in code point order (times/divide are above).
constexpr std::array<std::string_view, 64> kLatin1Letters{{
    "Agrave", "Aacute", "Acirc", "Atilde", "Auml", "Aring", "AElig", "Ccedil",
    "Egrave", "Eacute", "Ecirc", "Euml", "Igrave", "Iacute", "Icirc", "Iuml",
    "ETH", "Ntilde", "Ograve", "Oacute", "Ocirc", "Otilde", "Ouml", "",
    "Oslash", "Ugrave", "Uacute", "Ucirc", "Uuml", "Yacute", "THORN", "szlig",
    "agrave", "aacute", "acirc", "atilde", "auml", "aring", "aelig", "ccedil",
    "egrave", "eacute", "ecirc", "euml", "igrave", "iacute", "icirc", "iuml",
    "eth", "ntilde", "ograve", "oacute", "ocirc", "otilde", "ouml", "",
    "oslash", "ugrave", "uacute", "ucirc", "uuml", "yacute", "thorn", "yuml",
}};

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) cp = 0xfffd;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xc0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xe0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    out += static_cast<char>(0xf0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  }
}

char lower_ascii(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

const std::unordered_set<std::string_view> kClosesParagraph = {
    "address", "article", "aside", "blockquote", "center", "details", "dialog", "dir",
    "div", "dl", "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
    "h4", "h5", "h6", "header", "hgroup", "hr", "main", "menu", "nav", "ol", "p", "pre",
    "section", "summary", "table", "ul", "li", "dd", "dt"};

const std::unordered_set<std::string_view> kScopeBoundary = {
    "html", "table", "td", "th", "caption", "marquee", "object", "applet", "template",
    "button", "svg", "math"};

bool is_heading(std::string_view tag) {
  return tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6';
}

bool is_rcdata(std::string_view tag) { return tag == "textarea" || tag == "title"; }

class TreeBuilder {
 public:
  explicit TreeBuilder(std::string_view input) : in_(input) { stack_.push_back(&doc_.root()); }

  Document run() {
    while (pos_ < in_.size()) {
      if (in_[pos_] == '<') {
        if (!consume_markup()) text_.push_back('<'), ++pos_;
      } else {
        const auto next = in_.find('<', pos_);
        const auto end = next == std::string_view::npos ? in_.size() : next;
        text_.append(in_.substr(pos_, end - pos_));
        pos_ = end;
      }
    }
    flush_text();
    return std::move(doc_);
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
  Document doc_;
  std::vector<Node*> stack_;
  std::string text_;

  Node& current() { return *stack_.back(); }

  bool in_foreign() const {
    return std::any_of(stack_.begin(), stack_.end(),
                       [](const Node* n) { return n->is_element("svg") || n->is_element("math"); });
  }

  void flush_text() {
    if (text_.empty()) return;
    append_text(decode_entities(text_, false));
    text_.clear();
  }

  void append_text(std::string text) {
    if (text.empty()) return;
    auto& parent = current();
    if (parent.child_count() > 0 && parent.children().back()->is_text()) {
      auto& last = *parent.children().back();
      last.set_data(last.data() + text);
      return;
    }
    parent.append_child(doc_.make_text(std::move(text)));
  }

  // Returns false when '<' does not start markup and should be text.
  bool consume_markup() {
    const auto rest = in_.substr(pos_);
    if (rest.starts_with("<!--")) {
      flush_text();
      auto end = in_.find("-->", pos_ + 4);
      std::size_t close_len = 3;
      if (const auto alt = in_.find("--!>", pos_ + 4); alt != std::string_view::npos && alt < end) {
        end = alt;
        close_len = 4;
      }
      if (rest.starts_with("<!-->")) {
        current().append_child(doc_.make_comment(""));
        pos_ += 5;
        return true;
      }
      std::string data = end == std::string_view::npos
                             ? std::string(in_.substr(pos_ + 4))
                             : std::string(in_.substr(pos_ + 4, end - pos_ - 4));
      current().append_child(doc_.make_comment(std::move(data)));
      pos_ = end == std::string_view::npos ? in_.size() : end + close_len;
      return true;
    }
    if (rest.size() >= 2 && (rest[1] == '!' || rest[1] == '?')) {
      flush_text();
      const auto end = in_.find('>', pos_);
      const auto stop = end == std::string_view::npos ? in_.size() : end;
      const auto body = in_.substr(pos_ + 2, stop - pos_ - 2);
      std::string lowered;
      for (char c : body.substr(0, 7)) lowered += lower_ascii(c);
      if (rest[1] == '!' && lowered == "doctype") {
        current().append_child(doc_.make_doctype(std::string(in_.substr(pos_ + 2, stop - pos_ - 2))));
      } else if (rest[1] == '!' && body.starts_with("[CDATA[") && in_foreign()) {
        const auto cdata_end = in_.find("]]>", pos_);
        const auto cend = cdata_end == std::string_view::npos ? in_.size() : cdata_end;
        text_.append(in_.substr(pos_ + 9, cend - pos_ - 9));
        pos_ = cdata_end == std::string_view::npos ? in_.size() : cdata_end + 3;
        return true;
      } else {
        current().append_child(doc_.make_comment(std::string(rest[1] == '?' ? in_.substr(pos_ + 1, stop - pos_ - 1) : body)));
      }
      pos_ = end == std::string_view::npos ? in_.size() : end + 1;
      return true;
    }
    if (rest.size() >= 2 && rest[1] == '/') {
      if (rest.size() >= 3 && is_alpha(rest[2])) {
        flush_text();
        consume_end_tag();
        return true;
      }
      if (rest.starts_with("</>")) {
        pos_ += 3;
        return true;
      }
      if (rest.size() == 2) return false;
      flush_text();
      const auto end = in_.find('>', pos_);
      const auto stop = end == std::string_view::npos ? in_.size() : end;
      current().append_child(doc_.make_comment(std::string(in_.substr(pos_ + 2, stop - pos_ - 2))));
      pos_ = end == std::string_view::npos ? in_.size() : end + 1;
      return true;
    }
    if (rest.size() >= 2 && is_alpha(rest[1])) {
      flush_text();
      consume_start_tag();
      return true;
    }
    return false;
  }

  std::string read_tag_name() {
    std::string name;
    while (pos_ < in_.size() && !is_space(in_[pos_]) && in_[pos_] != '/' && in_[pos_] != '>') {
      name += lower_ascii(in_[pos_]);
      ++pos_;
    }
    return name;
  }

  void skip_space() {
    while (pos_ < in_.size() && is_space(in_[pos_])) ++pos_;
  }

  void consume_end_tag() {
    pos_ += 2;
    const std::string name = read_tag_name();
    const auto end = in_.find('>', pos_);
    pos_ = end == std::string_view::npos ? in_.size() : end + 1;
    close_element(name);
  }

  void close_element(std::string_view name) {
    if (is_void_element(name)) return;
    for (std::size_t i = stack_.size(); i > 1; --i) {
      if (stack_[i - 1]->is_element(name)) {
        stack_.resize(i - 1);
        return;
      }
      if (is_heading(name) && is_heading(stack_[i - 1]->tag())) {
        stack_.resize(i - 1);
        return;
      }
    }
  }

  // Pops to and including the nearest open `tag`, unless a boundary element
  // is reached first.
  bool close_in_scope(std::string_view tag, const std::unordered_set<std::string_view>& extra_boundary = {}) {
    for (std::size_t i = stack_.size(); i > 1; --i) {
      const auto& t = stack_[i - 1]->tag();
      if (t == tag) {
        stack_.resize(i - 1);
        return true;
      }
      if (kScopeBoundary.count(t) || extra_boundary.count(t)) return false;
    }
    return false;
  }

  void apply_implied_end_tags(std::string_view tag) {
    if (kClosesParagraph.count(tag)) close_in_scope("p");
    if (tag == "li") close_in_scope("li", {"ul", "ol"});
    if (tag == "dt" || tag == "dd") {
      close_in_scope("dt", {"dl"});
      close_in_scope("dd", {"dl"});
    }
    if ((tag == "option" || tag == "optgroup") && current().is_element("option")) stack_.pop_back();
    if (tag == "tr") {
      close_in_scope("td", {"tr"});
      close_in_scope("th", {"tr"});
      close_in_scope("tr", {"tbody", "thead", "tfoot"});
    }
    if (tag == "td" || tag == "th") {
      close_in_scope("td", {"tr"});
      close_in_scope("th", {"tr"});
    }
    if (tag == "tbody" || tag == "thead" || tag == "tfoot") {
      close_in_scope("tr");
      close_in_scope("tbody");
      close_in_scope("thead");
      close_in_scope("tfoot");
    }
    if (is_heading(tag) && is_heading(current().tag())) stack_.pop_back();
    if (tag == "a") close_in_scope("a");
    if (tag == "form") close_in_scope("form");
  }

  void consume_start_tag() {
    ++pos_;
    std::string name = read_tag_name();
    std::vector<Attribute> attrs;
    bool self_closing = false;
    while (pos_ < in_.size()) {
      skip_space();
      if (pos_ >= in_.size()) break;
      const char c = in_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '/') {
        ++pos_;
        if (pos_ < in_.size() && in_[pos_] == '>') {
          self_closing = true;
          ++pos_;
          break;
        }
        continue;
      }
      std::string attr_name;
      attr_name += lower_ascii(c);
      ++pos_;
      while (pos_ < in_.size() && !is_space(in_[pos_]) && in_[pos_] != '/' && in_[pos_] != '>' &&
             in_[pos_] != '=') {
        attr_name += lower_ascii(in_[pos_]);
        ++pos_;
      }
      skip_space();
      std::string value;
      if (pos_ < in_.size() && in_[pos_] == '=') {
        ++pos_;
        skip_space();
        if (pos_ < in_.size() && (in_[pos_] == '"' || in_[pos_] == '\'')) {
          const char quote = in_[pos_];
          const auto end = in_.find(quote, pos_ + 1);
          const auto stop = end == std::string_view::npos ? in_.size() : end;
          value = decode_entities(in_.substr(pos_ + 1, stop - pos_ - 1), true);
          pos_ = end == std::string_view::npos ? in_.size() : end + 1;
        } else {
          const auto start = pos_;
          while (pos_ < in_.size() && !is_space(in_[pos_]) && in_[pos_] != '>') ++pos_;
          value = decode_entities(in_.substr(start, pos_ - start), true);
        }
      }
      const bool duplicate = std::any_of(attrs.begin(), attrs.end(),
                                         [&](const Attribute& a) { return a.name == attr_name; });
      if (!duplicate) attrs.push_back({std::move(attr_name), std::move(value)});
    }

    const bool foreign = in_foreign() || name == "svg" || name == "math";
    if (!foreign) apply_implied_end_tags(name);
    auto& node = current().append_child(doc_.make_element(name, std::move(attrs)));
    if (is_void_element(name) || (self_closing && foreign)) return;

    if (is_raw_text_element(name) || is_rcdata(name)) {
      const auto end = find_raw_end(name);
      const auto content = in_.substr(pos_, end - pos_);
      if (!content.empty()) {
        node.append_child(doc_.make_text(is_rcdata(name) ? decode_entities(content, false)
                                                         : std::string(content)));
      }
      pos_ = end;
      if (pos_ < in_.size()) {
        const auto close = in_.find('>', pos_);
        pos_ = close == std::string_view::npos ? in_.size() : close + 1;
      }
      return;
    }
    stack_.push_back(&node);
  }

  // Position of the matching "</name" (case-insensitive) or end of input.
  std::size_t find_raw_end(std::string_view name) const {
    std::size_t p = pos_;
    while (true) {
      p = in_.find("</", p);
      if (p == std::string_view::npos) return in_.size();
      bool match = p + 2 + name.size() <= in_.size();
      for (std::size_t k = 0; match && k < name.size(); ++k) {
        if (lower_ascii(in_[p + 2 + k]) != name[k]) match = false;
      }
      if (match) {
        const auto after = p + 2 + name.size();
        if (after >= in_.size() || is_space(in_[after]) || in_[after] == '>' || in_[after] == '/')
          return p;
      }
      p += 2;
    }
  }
};

}  // namespace

bool is_raw_text_element(std::string_view tag) {
  return tag == "script" || tag == "style" || tag == "xmp" || tag == "iframe" ||
         tag == "noembed" || tag == "noframes" || tag == "plaintext";
}

bool is_void_element(std::string_view tag) {
  static const std::unordered_set<std::string_view> kVoid = {
      "area", "base", "br", "col", "embed", "hr", "img", "input", "link",
      "meta", "param", "source", "track", "wbr", "keygen"};
  return kVoid.count(tag) > 0;
}

bool looks_binary(std::string_view data) {
  const auto probe = data.substr(0, 8192);
  std::size_t control = 0;
  for (unsigned char c : probe) {
    if (c == 0) return true;
    if (c < 0x20 && c != '\n' && c != '\r' && c != '\t' && c != '\f') ++control;
  }
  return !probe.empty() && control * 10 > probe.size();
}

std::string decode_entities(std::string_view text, bool in_attribute) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c != '&') {
      out += c;
      ++i;
      continue;
    }
    if (i + 1 < text.size() && text[i + 1] == '#') {
      std::size_t j = i + 2;
      bool hex = false;
      if (j < text.size() && (text[j] == 'x' || text[j] == 'X')) {
        hex = true;
        ++j;
      }
      const auto digits_start = j;
      std::uint32_t cp = 0;
      while (j < text.size() && (hex ? std::isxdigit(static_cast<unsigned char>(text[j]))
                                     : std::isdigit(static_cast<unsigned char>(text[j])))) {
        const char d = text[j];
        const std::uint32_t v = std::isdigit(static_cast<unsigned char>(d))
                                    ? static_cast<std::uint32_t>(d - '0')
                                    : static_cast<std::uint32_t>(lower_ascii(d) - 'a' + 10);
        if (cp < 0x110000) cp = cp * (hex ? 16 : 10) + v;
        ++j;
      }
      if (j == digits_start) {
        out += c;
        ++i;
        continue;
      }
      if (j < text.size() && text[j] == ';') ++j;
      // Windows-1252 remapping of C1 controls is not applied.
      append_utf8(out, cp);
      i = j;
      continue;
    }
    bool matched = false;
    for (const auto& e : kEntities) {
      const auto candidate = text.substr(i + 1, e.name.size());
      if (candidate != e.name) continue;
      const auto after = i + 1 + e.name.size();
      const bool has_semicolon = after < text.size() && text[after] == ';';
      if (!has_semicolon) {
        // Legacy references without ';' only for the four basics, and not
        // inside attribute values where "&amp=" style query strings are common.
        const bool basic = e.name == "amp" || e.name == "lt" || e.name == "gt" || e.name == "quot";
        if (!basic || in_attribute) continue;
      }
      out += e.value;
      i = after + (has_semicolon ? 1 : 0);
      matched = true;
      break;
    }
    for (std::size_t k = 0; !matched && k < kLatin1Letters.size(); ++k) {
      const auto name = kLatin1Letters[k];
      if (name.empty() || text.substr(i + 1, name.size()) != name) continue;
      const auto after = i + 1 + name.size();
      if (after >= text.size() || text[after] != ';') continue;
      append_utf8(out, 0xC0 + static_cast<std::uint32_t>(k));
      i = after + 1;
      matched = true;
    }
    if (!matched) {
      out += c;
      ++i;
    }
  }
  return out;
}

Document parse_document(std::string_view markup) {
  if (markup.empty()) throw Error(ErrorCode::invalid_argument, "empty markup");
  if (looks_binary(markup)) throw Error(ErrorCode::binary_input, "input is binary, not markup text");
  // Drop a UTF-8 byte order mark.
  if (markup.starts_with("\xEF\xBB\xBF")) markup.remove_prefix(3);
  return TreeBuilder(markup).run();
}

}  // namespace phishgen
