// SPDX-License-Identifier: Apache-2.0
#include "phishgen/html.hpp"

namespace phishgen {
namespace {

void serialize_into(const Node& node, std::string& out) {
  switch (node.kind()) {
    case NodeKind::document:
      for (const auto& c : node.children()) serialize_into(*c, out);
      return;
    case NodeKind::text: {
      const Node* parent = node.parent();
      if (parent && is_raw_text_element(parent->tag())) {
        out += node.data();
      } else {
        out += escape_text(node.data());
      }
      return;
    }
    case NodeKind::comment:
      out += "<!--";
      out += node.data();
      out += "-->";
      return;
    case NodeKind::doctype:
      out += "<!";
      out += node.data();
      out += ">";
      return;
    case NodeKind::element:
      break;
  }
  out += '<';
  out += node.tag();
  for (const auto& attr : node.attributes()) {
    out += ' ';
    out += attr.name;
    out += "=\"";
    out += escape_attribute(attr.value);
    out += '"';
  }
  out += '>';
  if (is_void_element(node.tag())) return;
  for (const auto& c : node.children()) serialize_into(*c, out);
  out += "</";
  out += node.tag();
  out += '>';
}

// Text runs as the parser would produce them: adjacent text merged,
// empty text dropped.
std::vector<const Node*> normalized_children(const Node& node, std::vector<std::string>& merged) {
  std::vector<const Node*> out;
  merged.clear();
  for (const auto& c : node.children()) {
    if (c->is_text()) {
      if (c->data().empty()) continue;
      if (!out.empty() && out.back()->is_text()) {
        merged.back() += c->data();
        continue;
      }
      out.push_back(c.get());
      merged.push_back(c->data());
    } else {
      out.push_back(c.get());
      merged.emplace_back();
    }
  }
  return out;
}

}  // namespace

std::string escape_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_attribute(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string serialize_node(const Node& node) {
  std::string out;
  serialize_into(node, out);
  return out;
}

std::string serialize_document(const Document& doc) { return serialize_node(doc.root()); }

bool trees_equal(const Node& a, const Node& b) {
  if (a.kind() != b.kind() || a.tag() != b.tag()) return false;
  if (a.kind() != NodeKind::text && a.data() != b.data()) return false;
  if (a.attributes() != b.attributes()) return false;
  std::vector<std::string> text_a, text_b;
  const auto ca = normalized_children(a, text_a);
  const auto cb = normalized_children(b, text_b);
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (ca[i]->is_text() != cb[i]->is_text()) return false;
    if (ca[i]->is_text()) {
      if (text_a[i] != text_b[i]) return false;
      continue;
    }
    if (!trees_equal(*ca[i], *cb[i])) return false;
  }
  return true;
}

}  // namespace phishgen
