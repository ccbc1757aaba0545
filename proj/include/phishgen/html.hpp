// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phishgen {

using NodeId = std::uint32_t;

enum class NodeKind { document, element, text, comment, doctype };

struct Attribute {
  std::string name;
  std::string value;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

class Document;

/// One node of a DocumentTree. Nodes are owned by their parent; the
/// document owns the root. Identifiers are unique within a document and
/// survive copies of the document.
class Node {
 public:
  NodeKind kind() const noexcept { return kind_; }
  NodeId id() const noexcept { return id_; }
  bool is_element() const noexcept { return kind_ == NodeKind::element; }
  bool is_element(std::string_view tag) const noexcept {
    return kind_ == NodeKind::element && tag_ == tag;
  }
  bool is_text() const noexcept { return kind_ == NodeKind::text; }

  /// Lower-case tag name; empty for non-elements.
  const std::string& tag() const noexcept { return tag_; }

  /// Character data of text, comment and doctype nodes.
  const std::string& data() const noexcept { return data_; }
  void set_data(std::string data) { data_ = std::move(data); }

  const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
  const std::string* attribute(std::string_view name) const;
  bool has_attribute(std::string_view name) const { return attribute(name) != nullptr; }
  /// Overwrites an existing attribute in place or appends a new one.
  void set_attribute(std::string_view name, std::string value);
  bool remove_attribute(std::string_view name);

  Node* parent() const noexcept { return parent_; }
  const std::vector<std::unique_ptr<Node>>& children() const noexcept { return children_; }
  std::size_t child_count() const noexcept { return children_.size(); }
  Node& child(std::size_t i) const { return *children_.at(i); }
  /// Position of this node among its parent's children.
  std::size_t index_in_parent() const;

  Node& append_child(std::unique_ptr<Node> child);
  Node& insert_child(std::size_t index, std::unique_ptr<Node> child);
  std::unique_ptr<Node> remove_child(std::size_t index);

  bool has_ancestor(std::string_view tag) const;

 private:
  friend class Document;
  Node(NodeKind kind, NodeId id) : kind_(kind), id_(id) {}

  NodeKind kind_;
  NodeId id_;
  std::string tag_;
  std::string data_;
  std::vector<Attribute> attributes_;
  Node* parent_ = nullptr;
  std::vector<std::unique_ptr<Node>> children_;
};

/// Mutable document tree with stable node identifiers.
class Document {
 public:
  Document();
  Document(const Document& other);
  Document& operator=(const Document& other);
  Document(Document&&) noexcept = default;
  Document& operator=(Document&&) noexcept = default;
  ~Document() = default;

  Node& root() noexcept { return *root_; }
  const Node& root() const noexcept { return *root_; }

  std::unique_ptr<Node> make_element(std::string tag, std::vector<Attribute> attributes = {});
  std::unique_ptr<Node> make_text(std::string text);
  std::unique_ptr<Node> make_comment(std::string text);
  std::unique_ptr<Node> make_doctype(std::string text);

  Node* find(NodeId id);
  const Node* find(NodeId id) const;

  /// Pre-order (document order) traversal over every node below the root.
  void visit(const std::function<void(Node&)>& fn);
  void visit(const std::function<void(const Node&)>& fn) const;

  std::vector<Node*> elements(std::string_view tag);
  std::vector<const Node*> elements(std::string_view tag) const;
  std::vector<Node*> all_elements();
  std::size_t element_count() const;

  Node* first_element(std::string_view tag);
  const Node* first_element(std::string_view tag) const;
  /// Existing <head>/<body>, creating them when absent. Pages without an
  /// <html> element get the new node appended to the root.
  Node& ensure_head();
  Node& ensure_body();

 private:
  NodeId next_id_ = 1;
  std::unique_ptr<Node> root_;

  std::unique_ptr<Node> clone(const Node& node) const;
};

/// Concatenated text of a node's descendants.
std::string text_content(const Node& node);

/// Elements whose content is raw text (never entity-decoded or escaped).
bool is_raw_text_element(std::string_view tag);
bool is_void_element(std::string_view tag);

/// True when the input looks like binary data rather than markup text.
bool looks_binary(std::string_view data);

/// Error-tolerant HTML parse. Throws Error(binary_input) for binary data and
/// Error(invalid_argument) for empty input.
Document parse_document(std::string_view markup);

std::string serialize_document(const Document& doc);
std::string serialize_node(const Node& node);

/// Structural equality on tag names, attributes and text, after merging
/// adjacent text nodes and dropping empty ones. Node ids are ignored.
bool trees_equal(const Node& a, const Node& b);

/// Decodes HTML character references in text.
std::string decode_entities(std::string_view text, bool in_attribute);
std::string escape_text(std::string_view text);
std::string escape_attribute(std::string_view text);

}  // namespace phishgen
