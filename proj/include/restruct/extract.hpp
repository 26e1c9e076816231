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

// What a screen reader can reach on a page: visible text plus the labels
// that stand in for it. Visibility is decided from markup alone.

#ifndef RESTRUCT_EXTRACT_HPP_
#define RESTRUCT_EXTRACT_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "restruct/dom.hpp"
#include "restruct/text.hpp"

namespace restruct {

enum class ItemKind { visible_text, aria_label, alt_text, title_attr, control_name };

inline std::string_view to_string(ItemKind k) {
  switch (k) {
    case ItemKind::visible_text: return "visible-text";
    case ItemKind::aria_label: return "aria-label";
    case ItemKind::alt_text: return "alt-text";
    case ItemKind::title_attr: return "title-attr";
    case ItemKind::control_name: return "control-name";
  }
  return "?";
}

struct AccessibleItem {
  std::string path;
  ItemKind kind;
  std::string text;  // collapsed, never empty

  friend bool operator==(const AccessibleItem&, const AccessibleItem&) = default;
};

struct AccessibleContent {
  std::vector<AccessibleItem> items;
  std::string concatenated;

  std::vector<std::string> texts() const {
    std::vector<std::string> out;
    out.reserve(items.size());
    for (const auto& i : items) out.push_back(i.text);
    return out;
  }
};

namespace a11y {

/// Subtrees that never produce rendered text.
inline bool is_non_rendered_tag(std::string_view tag) {
  return tag == "script" || tag == "style" || tag == "template" || tag == "noscript" ||
         tag == "head" || tag == "title";
}

/// aria-hidden="true", the hidden attribute, or an inline display:none.
inline bool hides_subtree(const DomNode& n) {
  if (!n.is_element()) return false;
  if (const auto* v = n.attr("aria-hidden"); v && text::iequals(text::trim(*v), "true"))
    return true;
  if (n.has_attr("hidden")) return true;
  if (n.is_element("input") && text::iequals(text::trim(n.attr_or("type")), "hidden")) return true;
  if (const auto* style = n.attr("style")) {
    std::string compact;
    for (char c : *style)
      if (!text::is_space(c)) compact.push_back(text::to_lower(c));
    if (compact.find("display:none") != std::string::npos) return true;
  }
  return false;
}

/// True when neither the node nor an ancestor hides it from assistive
/// technology or keeps it out of rendering.
inline bool is_rendered(const Document& doc, NodeId id) {
  std::optional<NodeId> cur = id;
  while (cur) {
    const DomNode& n = doc[*cur];
    if (n.is_element() && (hides_subtree(n) || is_non_rendered_tag(n.tag))) return false;
    cur = n.parent;
  }
  return true;
}

inline bool has_role(const DomNode& n, std::string_view role) {
  const auto* v = n.attr("role");
  if (!v) return false;
  for (const auto& tok : text::split_ws(*v))
    if (text::iequals(tok, role)) return true;
  return false;
}

inline bool is_link(const DomNode& n) { return n.is_element("a") && n.has_attr("href"); }

inline bool is_button(const DomNode& n) {
  return n.is_element("button") || (n.is_element() && has_role(n, "button"));
}

inline bool is_form_control(const DomNode& n) {
  return n.is_element("input") || n.is_element("select") || n.is_element("textarea") ||
         n.is_element("button");
}

inline bool is_interactive(const DomNode& n) {
  if (!n.is_element()) return false;
  if (is_link(n) || is_form_control(n) || n.is_element("summary")) return true;
  static constexpr std::string_view kRoles[] = {"button", "link",   "checkbox", "menuitem",
                                                "tab",    "switch", "radio",    "textbox",
                                                "combobox", "option"};
  for (auto r : kRoles)
    if (has_role(n, r)) return true;
  return false;
}

/// Concatenated rendered text of a subtree, collapsed.
inline std::string visible_text(const Document& doc, NodeId id) {
  std::string raw;
  doc.walk(id, [&](const DomNode& n) {
    if (n.is_element() && (hides_subtree(n) || is_non_rendered_tag(n.tag))) return false;
    if (n.is_text()) raw += n.text;
    return true;
  });
  return text::collapse(raw);
}

/// Text content ignoring visibility (used for aria-labelledby targets).
inline std::string text_content(const Document& doc, NodeId id) {
  std::string raw;
  doc.walk(id, [&](const DomNode& n) {
    if (n.is_element() && (n.tag == "script" || n.tag == "style" || n.tag == "template"))
      return false;
    if (n.is_text()) raw += n.text;
    return true;
  });
  return text::collapse(raw);
}

inline std::string labelledby_text(const Document& doc, const DomNode& n) {
  const auto* refs = n.attr("aria-labelledby");
  if (!refs) return {};
  std::vector<std::string> parts;
  for (const auto& ref : text::split_ws(*refs)) {
    if (auto target = doc.element_by_id(ref)) {
      auto t = text_content(doc, *target);
      if (!t.empty()) parts.push_back(std::move(t));
    }
  }
  return text::join(parts, " ");
}

inline std::string sole_img_alt(const Document& doc, const DomNode& n) {
  if (n.is_element("img") || n.is_element("area")) return text::collapse(n.attr_or("alt"));
  std::optional<NodeId> img;
  std::size_t count = 0;
  doc.walk(n.id, [&](const DomNode& d) {
    if (d.id != n.id && d.is_element("img")) {
      ++count;
      img = d.id;
    }
    return true;
  });
  if (count != 1) return {};
  return text::collapse(doc[*img].attr_or("alt"));
}

/// Text of <label> elements associated with a form control, via for= or by
/// wrapping.
inline std::string associated_label_text(const Document& doc, const DomNode& n) {
  std::vector<std::string> parts;
  if (const auto* id = n.attr("id"); id && !id->empty()) {
    doc.walk(doc.root(), [&](const DomNode& d) {
      if (d.is_element("label") && d.attr_or("for") == *id) {
        auto t = visible_text(doc, d.id);
        if (!t.empty()) parts.push_back(std::move(t));
      }
      return true;
    });
  }
  for (auto cur = n.parent; cur; cur = doc[*cur].parent) {
    if (doc[*cur].is_element("label")) {
      auto t = visible_text(doc, *cur);
      if (!t.empty()) parts.push_back(std::move(t));
      break;
    }
  }
  return text::join(parts, " ");
}

inline bool is_button_input(const DomNode& n) {
  if (!n.is_element("input")) return false;
  auto type = text::lower(text::trim(n.attr_or("type")));
  return type == "submit" || type == "reset" || type == "button";
}

}  // namespace a11y

/// Name a screen reader announces for an element, by fixed precedence:
/// aria-label, aria-labelledby targets, alt of a sole img descendant, title,
/// rendered descendant text. Returns nullopt when all are empty.
inline std::optional<std::string> accessible_name(const Document& doc, NodeId id) {
  const DomNode& n = doc[id];
  if (!n.is_element()) throw Error("accessible_name: node is not an element");
  if (auto v = text::collapse(n.attr_or("aria-label")); !v.empty()) return v;
  if (auto v = a11y::labelledby_text(doc, n); !v.empty()) return v;
  if (auto v = a11y::sole_img_alt(doc, n); !v.empty()) return v;
  if (auto v = text::collapse(n.attr_or("title")); !v.empty()) return v;
  if (auto v = a11y::visible_text(doc, id); !v.empty()) return v;
  return std::nullopt;
}

namespace a11y {

// Any name source other than the title attribute, used to decide whether a
// title is the element's only name.
inline bool has_non_title_name(const Document& doc, const DomNode& n) {
  if (!text::collapse(n.attr_or("aria-label")).empty()) return true;
  if (!labelledby_text(doc, n).empty()) return true;
  if (!sole_img_alt(doc, n).empty()) return true;
  if (!visible_text(doc, n.id).empty()) return true;
  if (is_form_control(n) && !associated_label_text(doc, n).empty()) return true;
  if (is_button_input(n) && !text::collapse(n.attr_or("value")).empty()) return true;
  return false;
}

}  // namespace a11y

/// Collects screen-reader-reachable content in document order.
inline AccessibleContent extract_accessible(const Document& doc) {
  AccessibleContent out;
  auto add = [&](NodeId id, ItemKind kind, std::string_view raw) {
    auto t = text::collapse(raw);
    if (t.empty()) return;
    if (!out.concatenated.empty()) out.concatenated += ' ';
    out.concatenated += t;
    out.items.push_back({node_path(doc, id), kind, std::move(t)});
  };
  doc.walk(doc.root(), [&](const DomNode& n) {
    if (n.is_text()) {
      add(n.id, ItemKind::visible_text, n.text);
      return false;
    }
    if (!n.is_element()) return false;
    if (a11y::is_non_rendered_tag(n.tag) || a11y::hides_subtree(n)) return false;
    if (const auto* v = n.attr("aria-label")) add(n.id, ItemKind::aria_label, *v);
    const bool image_input =
        n.is_element("input") && text::iequals(text::trim(n.attr_or("type")), "image");
    if (n.is_element("img") || n.is_element("area") || image_input)
      if (const auto* v = n.attr("alt")) add(n.id, ItemKind::alt_text, *v);
    if (a11y::is_interactive(n) && n.has_attr("title") && !a11y::has_non_title_name(doc, n))
      add(n.id, ItemKind::title_attr, n.attr_or("title"));
    if (a11y::is_button_input(n))
      if (const auto* v = n.attr("value")) add(n.id, ItemKind::control_name, *v);
    return true;
  });
  return out;
}

}  // namespace restruct

#endif  // RESTRUCT_EXTRACT_HPP_
