/*
 * Copyright 2026 The restruct Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Document model: an id-indexed node table with stable identifiers.
//
// Ids are handed out in creation order, which for a freshly parsed document
// is document order. Renaming tags or editing attributes never renumbers;
// nodes appended later simply get larger ids. Removed nodes keep their slot
// (marked dead) so that ids are never reused.

#ifndef RESTRUCT_DOM_HPP_
#define RESTRUCT_DOM_HPP_

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "restruct/text.hpp"

namespace restruct {

struct NodeId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

enum class NodeKind { element, text, comment, doctype };

struct Attribute {
  std::string name;  // always lowercase
  std::string value;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct DomNode {
  NodeId id;
  NodeKind kind = NodeKind::element;
  std::string tag;  // elements only, lowercase
  std::vector<Attribute> attributes;
  std::string text;  // text, comment and doctype payload
  std::vector<NodeId> children;
  std::optional<NodeId> parent;

  bool is_element() const noexcept { return kind == NodeKind::element; }
  bool is_text() const noexcept { return kind == NodeKind::text; }
  bool is_element(std::string_view name) const noexcept {
    return kind == NodeKind::element && tag == name;
  }

  const std::string* attr(std::string_view name) const noexcept {
    for (const auto& a : attributes)
      if (text::iequals(a.name, name)) return &a.value;
    return nullptr;
  }
  bool has_attr(std::string_view name) const noexcept { return attr(name) != nullptr; }
  std::string attr_or(std::string_view name, std::string_view fallback = {}) const {
    const auto* v = attr(name);
    return v ? *v : std::string(fallback);
  }

  /// Sets (or overwrites in place) an attribute; the name is case folded.
  void set_attr(std::string_view name, std::string value) {
    for (auto& a : attributes)
      if (text::iequals(a.name, name)) {
        a.value = std::move(value);
        return;
      }
    attributes.push_back({text::lower(name), std::move(value)});
  }

  bool remove_attr(std::string_view name) {
    auto it = std::find_if(attributes.begin(), attributes.end(),
                           [&](const Attribute& a) { return text::iequals(a.name, name); });
    if (it == attributes.end()) return false;
    attributes.erase(it);
    return true;
  }
};

/// The parsed document. `root()` is always the html element; a doctype and
/// any comments seen before it live in `prologue()` with no parent.
class Document {
 public:
  Document() = default;

  NodeId root() const noexcept { return root_; }
  std::size_t next_id() const noexcept { return nodes_.size(); }

  bool contains(NodeId id) const noexcept {
    return id.value < nodes_.size() && alive_[id.value];
  }

  const DomNode& node(NodeId id) const { return nodes_.at(checked(id)); }
  DomNode& node(NodeId id) { return nodes_.at(checked(id)); }
  const DomNode& operator[](NodeId id) const { return node(id); }

  const std::vector<NodeId>& prologue() const noexcept { return prologue_; }

  NodeId create_element(std::string_view tag, std::vector<Attribute> attrs = {}) {
    DomNode n;
    n.kind = NodeKind::element;
    n.tag = text::lower(tag);
    n.attributes = std::move(attrs);
    return push(std::move(n));
  }
  NodeId create_text(std::string value) {
    DomNode n;
    n.kind = NodeKind::text;
    n.text = std::move(value);
    return push(std::move(n));
  }
  NodeId create_comment(std::string value) {
    DomNode n;
    n.kind = NodeKind::comment;
    n.text = std::move(value);
    return push(std::move(n));
  }
  NodeId create_doctype(std::string value) {
    DomNode n;
    n.kind = NodeKind::doctype;
    n.text = std::move(value);
    return push(std::move(n));
  }

  void set_root(NodeId id) { root_ = id; }
  void add_prologue(NodeId id) { prologue_.push_back(id); }

  void append_child(NodeId parent, NodeId child) {
    detach(child);
    node(parent).children.push_back(child);
    node(child).parent = parent;
  }

  void insert_child(NodeId parent, std::size_t index, NodeId child) {
    detach(child);
    auto& kids = node(parent).children;
    index = std::min(index, kids.size());
    kids.insert(kids.begin() + static_cast<std::ptrdiff_t>(index), child);
    node(child).parent = parent;
  }

  /// Unlinks a node from its parent; the subtree stays alive.
  void detach(NodeId id) {
    auto& n = node(id);
    if (!n.parent) return;
    auto& kids = node(*n.parent).children;
    kids.erase(std::remove(kids.begin(), kids.end(), id), kids.end());
    n.parent.reset();
  }

  /// Unlinks and kills a whole subtree.
  void remove(NodeId id) {
    detach(id);
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
      NodeId cur = stack.back();
      stack.pop_back();
      for (NodeId c : nodes_[cur.value].children) stack.push_back(c);
      alive_[cur.value] = false;
    }
  }

  /// Replaces an element by its children, in place.
  void unwrap(NodeId id) {
    auto& n = node(id);
    if (!n.parent) return;
    NodeId parent = *n.parent;
    auto& kids = node(parent).children;
    auto pos = static_cast<std::size_t>(std::find(kids.begin(), kids.end(), id) - kids.begin());
    std::vector<NodeId> moved = n.children;
    n.children.clear();
    detach(id);
    for (std::size_t i = 0; i < moved.size(); ++i) {
      node(moved[i]).parent.reset();
      insert_child(parent, pos + i, moved[i]);
    }
    alive_[id.value] = false;
  }

  std::optional<NodeId> child_element(NodeId parent, std::string_view tag) const {
    for (NodeId c : node(parent).children)
      if (node(c).is_element(tag)) return c;
    return std::nullopt;
  }

  std::optional<NodeId> head() const { return child_element(root_, "head"); }
  std::optional<NodeId> body() const { return child_element(root_, "body"); }

  /// Pre-order walk. The visitor returns false to skip a node's children.
  template <typename Visitor>
  void walk(NodeId from, Visitor&& visit) const {
    std::vector<NodeId> stack{from};
    while (!stack.empty()) {
      NodeId cur = stack.back();
      stack.pop_back();
      if (!visit(node(cur))) continue;
      const auto& kids = node(cur).children;
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
  }

  /// Every live node reachable from the root, in document order.
  std::vector<NodeId> document_order() const {
    std::vector<NodeId> out;
    walk(root_, [&](const DomNode& n) {
      out.push_back(n.id);
      return true;
    });
    return out;
  }

  std::vector<NodeId> elements_by_tag(std::string_view tag) const {
    std::vector<NodeId> out;
    walk(root_, [&](const DomNode& n) {
      if (n.is_element(tag)) out.push_back(n.id);
      return true;
    });
    return out;
  }

  /// First element in document order carrying `id="value"`.
  std::optional<NodeId> element_by_id(std::string_view value) const {
    std::optional<NodeId> found;
    walk(root_, [&](const DomNode& n) {
      if (found) return false;
      if (n.is_element()) {
        const auto* v = n.attr("id");
        if (v && *v == value) found = n.id;
      }
      return true;
    });
    return found;
  }

  bool is_ancestor(NodeId ancestor, NodeId id) const {
    auto cur = node(id).parent;
    while (cur) {
      if (*cur == ancestor) return true;
      cur = node(*cur).parent;
    }
    return false;
  }

 private:
  std::size_t checked(NodeId id) const {
    if (!contains(id)) throw Error("unknown node id " + std::to_string(id.value));
    return id.value;
  }

  NodeId push(DomNode n) {
    n.id = NodeId{static_cast<std::uint32_t>(nodes_.size())};
    nodes_.push_back(std::move(n));
    alive_.push_back(true);
    return nodes_.back().id;
  }

  std::vector<DomNode> nodes_;
  std::vector<bool> alive_;
  std::vector<NodeId> prologue_;
  NodeId root_{};
};

namespace html {

inline bool is_void(std::string_view tag) noexcept {
  static constexpr std::string_view kVoid[] = {
      "area", "base", "basefont", "bgsound", "br",    "col",    "embed", "hr",  "img",
      "input", "keygen", "link",  "meta",    "param", "source", "track", "wbr"};
  return std::find(std::begin(kVoid), std::end(kVoid), tag) != std::end(kVoid);
}

/// Elements whose content is raw text (no markup, no entity decoding).
inline bool is_raw_text(std::string_view tag) noexcept {
  static constexpr std::string_view kRaw[] = {"script",   "style",    "xmp",      "iframe",
                                              "noembed",  "noframes", "noscript", "plaintext"};
  return std::find(std::begin(kRaw), std::end(kRaw), tag) != std::end(kRaw);
}

/// Elements whose content is text with entity decoding but no markup.
inline bool is_escapable_raw_text(std::string_view tag) noexcept {
  return tag == "title" || tag == "textarea";
}

inline int heading_level(std::string_view tag) noexcept {
  if (tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6') return tag[1] - '0';
  return 0;
}

inline bool is_heading(const DomNode& n) noexcept {
  return n.is_element() && heading_level(n.tag) > 0;
}

inline std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '&') {
      out += "&amp;";
    } else if (c == '<') {
      out += "&lt;";
    } else if (c == '>') {
      out += "&gt;";
    } else if (c == '\xC2' && i + 1 < s.size() && s[i + 1] == '\xA0') {
      out += "&nbsp;";
      ++i;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

inline std::string escape_attribute(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '&') {
      out += "&amp;";
    } else if (c == '"') {
      out += "&quot;";
    } else if (c == '<') {
      out += "&lt;";
    } else if (c == '>') {
      out += "&gt;";
    } else if (c == '\xC2' && i + 1 < s.size() && s[i + 1] == '\xA0') {
      out += "&nbsp;";
      ++i;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

inline std::string start_tag(const DomNode& n) {
  std::string out = "<" + n.tag;
  for (const auto& a : n.attributes) {
    out += ' ';
    out += a.name;
    out += "=\"";
    out += escape_attribute(a.value);
    out += '"';
  }
  out += '>';
  return out;
}

inline std::string end_tag(const DomNode& n) { return "</" + n.tag + ">"; }

namespace detail {

inline void serialize_into(const Document& doc, NodeId id, std::string& out) {
  const DomNode& n = doc[id];
  switch (n.kind) {
    case NodeKind::doctype:
      out += "<!DOCTYPE " + n.text + ">";
      return;
    case NodeKind::comment:
      out += "<!--" + n.text + "-->";
      return;
    case NodeKind::text: {
      const bool raw = n.parent && is_raw_text(doc[*n.parent].tag);
      out += raw ? n.text : escape_text(n.text);
      return;
    }
    case NodeKind::element:
      break;
  }
  out += start_tag(n);
  if (is_void(n.tag)) return;
  // The parser drops one newline right after these start tags.
  if ((n.tag == "pre" || n.tag == "textarea" || n.tag == "listing") && !n.children.empty()) {
    const DomNode& first = doc[n.children.front()];
    if (first.is_text() && !first.text.empty() && first.text.front() == '\n') out += '\n';
  }
  for (NodeId c : n.children) serialize_into(doc, c, out);
  out += end_tag(n);
}

}  // namespace detail

/// Serializes one subtree (outer HTML).
inline std::string serialize_node(const Document& doc, NodeId id) {
  std::string out;
  detail::serialize_into(doc, id, out);
  return out;
}

inline std::string serialize_children(const Document& doc, NodeId id) {
  std::string out;
  for (NodeId c : doc[id].children) detail::serialize_into(doc, c, out);
  return out;
}

}  // namespace html

/// Serializes the whole document, prologue included.
inline std::string serialize(const Document& doc) {
  std::string out;
  for (NodeId p : doc.prologue())
    if (doc.contains(p)) html::detail::serialize_into(doc, p, out);
  html::detail::serialize_into(doc, doc.root(), out);
  return out;
}

/// CSS-like locator from the root: "html>body>p:nth-of-type(2)". The
/// `:nth-of-type(k)` suffix is present only when the parent has more than
/// one element child with the same tag. Non-element nodes use "#text(k)" /
/// "#comment(k)" with k counted among siblings of the same kind.
inline std::string node_path(const Document& doc, NodeId id) {
  std::vector<std::string> segments;
  NodeId cur = id;
  while (true) {
    const DomNode& n = doc[cur];
    if (!n.parent) {
      segments.push_back(n.is_element() ? n.tag : std::string("#orphan"));
      break;
    }
    const DomNode& parent = doc[*n.parent];
    std::size_t position = 0, same = 0;
    for (NodeId sib : parent.children) {
      const DomNode& s = doc[sib];
      const bool match = n.is_element() ? s.is_element(n.tag) : s.kind == n.kind;
      if (!match) continue;
      ++same;
      if (sib == cur) position = same;
    }
    if (n.is_element()) {
      segments.push_back(same > 1 ? n.tag + ":nth-of-type(" + std::to_string(position) + ")"
                                  : n.tag);
    } else {
      const char* label = n.kind == NodeKind::text ? "#text(" : "#comment(";
      segments.push_back(label + std::to_string(position) + ")");
    }
    cur = *n.parent;
  }
  std::reverse(segments.begin(), segments.end());
  return text::join(segments, ">");
}

/// Inverse of node_path(). Returns nullopt when nothing matches.
inline std::optional<NodeId> resolve_path(const Document& doc, std::string_view path) {
  std::vector<std::string> segments;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t end = path.find('>', start);
    if (end == std::string_view::npos) end = path.size();
    segments.emplace_back(path.substr(start, end - start));
    start = end + 1;
  }
  if (segments.empty() || segments.front() != doc[doc.root()].tag) return std::nullopt;
  NodeId cur = doc.root();
  for (std::size_t i = 1; i < segments.size(); ++i) {
    const std::string& seg = segments[i];
    std::string name = seg;
    std::size_t wanted = 0;  // 0 = the only one
    bool element = true;
    NodeKind kind = NodeKind::element;
    if (auto p = seg.find(":nth-of-type("); p != std::string::npos) {
      name = seg.substr(0, p);
      wanted = std::stoul(seg.substr(p + 13));
    } else if (seg.rfind("#text(", 0) == 0 || seg.rfind("#comment(", 0) == 0) {
      element = false;
      kind = seg[1] == 't' ? NodeKind::text : NodeKind::comment;
      wanted = std::stoul(seg.substr(seg.find('(') + 1));
    }
    std::size_t same = 0;
    std::optional<NodeId> next;
    for (NodeId c : doc[cur].children) {
      const DomNode& n = doc[c];
      const bool match = element ? n.is_element(name) : n.kind == kind;
      if (!match) continue;
      ++same;
      if ((wanted == 0 && same == 1) || same == wanted) next = c;
    }
    if (!next || (element && wanted == 0 && same != 1)) return std::nullopt;
    cur = *next;
  }
  return cur;
}

/// Deep-copies a subtree of `src` into `dst`, returning the new subtree root
/// (unattached).
inline NodeId clone_into(const Document& src, NodeId id, Document& dst) {
  const DomNode& n = src[id];
  NodeId copy;
  switch (n.kind) {
    case NodeKind::element:
      copy = dst.create_element(n.tag, n.attributes);
      break;
    case NodeKind::text:
      copy = dst.create_text(n.text);
      break;
    case NodeKind::comment:
      copy = dst.create_comment(n.text);
      break;
    case NodeKind::doctype:
      copy = dst.create_doctype(n.text);
      break;
  }
  for (NodeId c : n.children) dst.append_child(copy, clone_into(src, c, dst));
  return copy;
}

/// Structural equality of two subtrees: kinds, tags, attribute lists and
/// text payloads; node ids are ignored.
inline bool structurally_equal(const Document& a, NodeId x, const Document& b, NodeId y) {
  const DomNode& m = a[x];
  const DomNode& n = b[y];
  if (m.kind != n.kind || m.tag != n.tag || m.text != n.text) return false;
  if (m.attributes != n.attributes) return false;
  if (m.children.size() != n.children.size()) return false;
  for (std::size_t i = 0; i < m.children.size(); ++i)
    if (!structurally_equal(a, m.children[i], b, n.children[i])) return false;
  return true;
}

inline bool structurally_equal(const Document& a, const Document& b) {
  if (a.prologue().size() != b.prologue().size()) return false;
  for (std::size_t i = 0; i < a.prologue().size(); ++i)
    if (!structurally_equal(a, a.prologue()[i], b, b.prologue()[i])) return false;
  return structurally_equal(a, a.root(), b, b.root());
}

}  // namespace restruct

template <>
struct std::hash<restruct::NodeId> {
  std::size_t operator()(restruct::NodeId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

#endif  // RESTRUCT_DOM_HPP_
