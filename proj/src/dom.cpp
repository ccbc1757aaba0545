// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <stdexcept>

#include "phishgen/html.hpp"

namespace phishgen {

const std::string* Node::attribute(std::string_view name) const {
  for (const auto& attr : attributes_) {
    if (attr.name == name) return &attr.value;
  }
  return nullptr;
}

void Node::set_attribute(std::string_view name, std::string value) {
  for (auto& attr : attributes_) {
    if (attr.name == name) {
      attr.value = std::move(value);
      return;
    }
  }
  attributes_.push_back({std::string(name), std::move(value)});
}

bool Node::remove_attribute(std::string_view name) {
  const auto it = std::find_if(attributes_.begin(), attributes_.end(),
                               [&](const Attribute& a) { return a.name == name; });
  if (it == attributes_.end()) return false;
  attributes_.erase(it);
  return true;
}

std::size_t Node::index_in_parent() const {
  if (!parent_) return 0;
  const auto& siblings = parent_->children_;
  for (std::size_t i = 0; i < siblings.size(); ++i) {
    if (siblings[i].get() == this) return i;
  }
  return 0;
}

Node& Node::append_child(std::unique_ptr<Node> child) {
  child->parent_ = this;
  children_.push_back(std::move(child));
  return *children_.back();
}

Node& Node::insert_child(std::size_t index, std::unique_ptr<Node> child) {
  index = std::min(index, children_.size());
  child->parent_ = this;
  auto it = children_.insert(children_.begin() + static_cast<std::ptrdiff_t>(index), std::move(child));
  return **it;
}

std::unique_ptr<Node> Node::remove_child(std::size_t index) {
  if (index >= children_.size()) throw std::out_of_range("remove_child");
  auto node = std::move(children_[index]);
  children_.erase(children_.begin() + static_cast<std::ptrdiff_t>(index));
  node->parent_ = nullptr;
  return node;
}

bool Node::has_ancestor(std::string_view tag) const {
  for (auto* p = parent_; p; p = p->parent_) {
    if (p->is_element(tag)) return true;
  }
  return false;
}

Document::Document() : root_(new Node(NodeKind::document, 0)) {}

Document::Document(const Document& other)
    : next_id_(other.next_id_), root_(clone(*other.root_)) {}

Document& Document::operator=(const Document& other) {
  if (this != &other) {
    next_id_ = other.next_id_;
    root_ = clone(*other.root_);
  }
  return *this;
}

std::unique_ptr<Node> Document::clone(const Node& node) const {
  std::unique_ptr<Node> copy(new Node(node.kind_, node.id_));
  copy->tag_ = node.tag_;
  copy->data_ = node.data_;
  copy->attributes_ = node.attributes_;
  copy->children_.reserve(node.children_.size());
  for (const auto& c : node.children_) copy->append_child(clone(*c));
  return copy;
}

std::unique_ptr<Node> Document::make_element(std::string tag, std::vector<Attribute> attributes) {
  std::unique_ptr<Node> node(new Node(NodeKind::element, next_id_++));
  node->tag_ = std::move(tag);
  node->attributes_ = std::move(attributes);
  return node;
}

std::unique_ptr<Node> Document::make_text(std::string text) {
  std::unique_ptr<Node> node(new Node(NodeKind::text, next_id_++));
  node->data_ = std::move(text);
  return node;
}

std::unique_ptr<Node> Document::make_comment(std::string text) {
  std::unique_ptr<Node> node(new Node(NodeKind::comment, next_id_++));
  node->data_ = std::move(text);
  return node;
}

std::unique_ptr<Node> Document::make_doctype(std::string text) {
  std::unique_ptr<Node> node(new Node(NodeKind::doctype, next_id_++));
  node->data_ = std::move(text);
  return node;
}

namespace {

template <typename N, typename F>
void walk(N& node, F& fn) {
  for (const auto& c : node.children()) {
    fn(*c);
    walk(static_cast<N&>(*c), fn);
  }
}

}  // namespace

void Document::visit(const std::function<void(Node&)>& fn) { walk(*root_, fn); }

void Document::visit(const std::function<void(const Node&)>& fn) const {
  walk(static_cast<const Node&>(*root_), fn);
}

Node* Document::find(NodeId id) {
  if (id == 0) return root_.get();
  Node* found = nullptr;
  visit([&](Node& n) {
    if (!found && n.id() == id) found = &n;
  });
  return found;
}

const Node* Document::find(NodeId id) const {
  return const_cast<Document*>(this)->find(id);
}

std::vector<Node*> Document::elements(std::string_view tag) {
  std::vector<Node*> out;
  visit([&](Node& n) {
    if (n.is_element(tag)) out.push_back(&n);
  });
  return out;
}

std::vector<const Node*> Document::elements(std::string_view tag) const {
  std::vector<const Node*> out;
  visit([&](const Node& n) {
    if (n.is_element(tag)) out.push_back(&n);
  });
  return out;
}

std::vector<Node*> Document::all_elements() {
  std::vector<Node*> out;
  visit([&](Node& n) {
    if (n.is_element()) out.push_back(&n);
  });
  return out;
}

std::size_t Document::element_count() const {
  std::size_t count = 0;
  visit([&](const Node& n) {
    if (n.is_element()) ++count;
  });
  return count;
}

Node* Document::first_element(std::string_view tag) {
  Node* found = nullptr;
  visit([&](Node& n) {
    if (!found && n.is_element(tag)) found = &n;
  });
  return found;
}

const Node* Document::first_element(std::string_view tag) const {
  const Node* found = nullptr;
  visit([&](const Node& n) {
    if (!found && n.is_element(tag)) found = &n;
  });
  return found;
}

Node& Document::ensure_head() {
  if (auto* head = first_element("head")) return *head;
  if (auto* html = first_element("html")) return html->insert_child(0, make_element("head"));
  // Keep a leading doctype first.
  std::size_t pos = 0;
  while (pos < root_->child_count() && root_->child(pos).kind() == NodeKind::doctype) ++pos;
  return root_->insert_child(pos, make_element("head"));
}

Node& Document::ensure_body() {
  if (auto* body = first_element("body")) return *body;
  if (auto* html = first_element("html")) {
    // Move everything after <head> into a new body.
    auto body = make_element("body");
    std::size_t i = 0;
    while (i < html->child_count()) {
      if (html->child(i).is_element("head")) {
        ++i;
        continue;
      }
      body->append_child(html->remove_child(i));
    }
    return html->append_child(std::move(body));
  }
  return *root_;
}

std::string text_content(const Node& node) {
  if (node.is_text()) return node.data();
  std::string out;
  for (const auto& c : node.children()) {
    if (c->kind() == NodeKind::comment || c->kind() == NodeKind::doctype) continue;
    out += text_content(*c);
  }
  return out;
}

}  // namespace phishgen
