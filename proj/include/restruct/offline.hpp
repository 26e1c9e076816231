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

// Deterministic stand-ins for the model, used for network-free runs and
// tests: a rule-based tag fixer (reorganize) and a text-only rebuild
// (regenerate).

#ifndef RESTRUCT_OFFLINE_HPP_
#define RESTRUCT_OFFLINE_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "restruct/audit.hpp"
#include "restruct/dom.hpp"
#include "restruct/extract.hpp"
#include "restruct/html_parser.hpp"
#include "restruct/patches.hpp"

namespace restruct {
namespace offline {

/// Rendered elements of body in document order.
inline std::vector<NodeId> rendered_elements(const Document& doc) {
  std::vector<NodeId> out;
  auto body = doc.body();
  if (!body) return out;
  doc.walk(*body, [&](const DomNode& n) {
    if (!n.is_element()) return false;
    if (a11y::is_non_rendered_tag(n.tag) || a11y::hides_subtree(n)) return false;
    out.push_back(n.id);
    return true;
  });
  return out;
}

inline bool is_list_or_nav(const DomNode& n) {
  if (n.is_element("ul") || n.is_element("ol") || n.is_element("nav") || n.is_element("menu"))
    return true;
  return a11y::has_role(n, "navigation") || a11y::has_role(n, "list") ||
         a11y::has_role(n, "menu") || a11y::has_role(n, "menubar");
}

inline std::optional<NodeId> list_or_nav_ancestor(const Document& doc, NodeId id) {
  for (auto cur = doc[id].parent; cur; cur = doc[*cur].parent)
    if (is_list_or_nav(doc[*cur])) return *cur;
  return std::nullopt;
}

/// The single link of a heading whose whole text is that link's text.
inline std::optional<NodeId> category_link(const Document& doc, NodeId heading) {
  std::vector<NodeId> links;
  doc.walk(heading, [&](const DomNode& n) {
    if (a11y::is_link(n)) links.push_back(n.id);
    return true;
  });
  if (links.size() != 1) return std::nullopt;
  auto heading_text = a11y::visible_text(doc, heading);
  if (heading_text.empty() || heading_text != a11y::visible_text(doc, links.front()))
    return std::nullopt;
  return links.front();
}

inline constexpr std::size_t kMinCategoryRun = 3;

/// Link-only headings grouped under a shared list/nav container, keeping
/// only groups of at least kMinCategoryRun. With `parent_fallback`, headings
/// outside any list or nav group by their parent instead.
inline std::vector<std::vector<NodeId>> category_groups(const Document& doc,
                                                        bool parent_fallback) {
  std::map<NodeId, std::vector<NodeId>> groups;
  std::vector<NodeId> order;
  for (NodeId id : rendered_elements(doc)) {
    if (!html::is_heading(doc[id]) || !category_link(doc, id)) continue;
    auto key = list_or_nav_ancestor(doc, id);
    if (!key && parent_fallback) key = doc[id].parent;
    if (!key) continue;
    auto& g = groups[*key];
    if (g.empty()) order.push_back(*key);
    g.push_back(id);
  }
  std::vector<std::vector<NodeId>> out;
  for (NodeId k : order)
    if (groups[k].size() >= kMinCategoryRun) out.push_back(groups[k]);
  return out;
}

inline bool has_main_landmark(const Document& doc) {
  bool found = false;
  doc.walk(doc.root(), [&](const DomNode& n) {
    if (found || !n.is_element() || n.is_element("template")) return false;
    if (n.is_element("main") || a11y::has_role(n, "main")) found = true;
    return !found;
  });
  return found;
}

/// A name for a nameless (or title-only) control taken from sources the
/// accessible-name precedence does not reach on its own.
inline std::string derivable_name(const Document& doc, NodeId id) {
  const DomNode& n = doc[id];
  if (auto t = text::collapse(n.attr_or("title")); !t.empty()) return t;
  std::string found;
  doc.walk(id, [&](const DomNode& d) {
    if (!found.empty()) return false;
    if (d.id == id) return true;
    if (d.is_element("img")) found = text::collapse(d.attr_or("alt"));
    if (found.empty() && d.is_element())
      found = text::collapse(d.attr_or("aria-label"));
    if (found.empty() && d.is_element("title") && d.parent && doc[*d.parent].is_element("svg"))
      found = a11y::text_content(doc, d.id);
    return found.empty();
  });
  return found;
}

/// True when the element has no author-provided name: no aria-label, no
/// resolvable aria-labelledby, no alt from a sole image and no visible text.
inline bool lacks_explicit_name(const Document& doc, NodeId id) {
  const DomNode& n = doc[id];
  return text::collapse(n.attr_or("aria-label")).empty() &&
         a11y::labelledby_text(doc, n).empty() && a11y::sole_img_alt(doc, n).empty() &&
         a11y::visible_text(doc, id).empty();
}

inline constexpr double kMainTextShare = 0.60;

inline bool main_candidate_tag(std::string_view tag) {
  return tag == "div" || tag == "section" || tag == "article" || tag == "center";
}

}  // namespace offline

/// Rule-based tag fixer. Rules run on a working copy, each seeing the
/// effect of the previous ones:
///   category demotion: link-only headings, three or more under one list or
///     nav container, become div;
///   heading renumber: a heading more than one level below the previous
///     heading moves to previous + 1;
///   control labeling: links and buttons whose only name source is a title
///     (or that have none) get aria-label from title, an image alt, a
///     descendant aria-label or an svg title;
///   landmark: without any main landmark, the deepest div/section/article
///     holding more than 60% of the visible text gets role="main".
inline std::vector<TagPatch> offline_reorganize(const Document& doc) {
  std::vector<TagPatch> out;
  Document work = doc;
  auto commit = [&](std::vector<TagPatch> batch) {
    work = apply_patches(std::move(work), batch);
    out.insert(out.end(), batch.begin(), batch.end());
  };

  {
    std::vector<TagPatch> batch;
    for (const auto& group : offline::category_groups(work, false))
      for (NodeId h : group) batch.push_back({h, "div", {}, {}});
    commit(std::move(batch));
  }
  {
    std::vector<TagPatch> batch;
    int previous = 0;
    for (NodeId id : offline::rendered_elements(work)) {
      int level = html::heading_level(work[id].tag);
      if (level == 0) continue;
      if (previous > 0 && level > previous + 1) {
        level = previous + 1;
        batch.push_back({id, "h" + std::to_string(level), {}, {}});
      }
      previous = level;
    }
    commit(std::move(batch));
  }
  {
    std::vector<TagPatch> batch;
    for (NodeId id : offline::rendered_elements(work)) {
      const DomNode& n = work[id];
      if (!a11y::is_link(n) && !a11y::is_button(n)) continue;
      if (!offline::lacks_explicit_name(work, id)) continue;
      auto name = offline::derivable_name(work, id);
      if (!name.empty()) batch.push_back({id, std::nullopt, {{"aria-label", name}}, {}});
    }
    commit(std::move(batch));
  }
  if (!offline::has_main_landmark(work)) {
    std::unordered_map<NodeId, std::size_t> chars;
    std::size_t total = 0;
    if (auto body = work.body()) {
      work.walk(*body, [&](const DomNode& n) {
        if (n.is_element() && (a11y::is_non_rendered_tag(n.tag) || a11y::hides_subtree(n)))
          return false;
        if (n.is_text()) {
          std::size_t len = text::utf8_length(text::collapse(n.text));
          total += len;
          for (auto cur = n.parent; cur; cur = work[*cur].parent) chars[*cur] += len;
        }
        return true;
      });
    }
    std::optional<NodeId> best;
    std::size_t best_depth = 0;
    for (NodeId id : offline::rendered_elements(work)) {
      const DomNode& n = work[id];
      if (!offline::main_candidate_tag(n.tag) || n.has_attr("role")) continue;
      if (total == 0 || static_cast<double>(chars[id]) <= offline::kMainTextShare * total)
        continue;
      std::size_t depth = 0;
      for (auto cur = n.parent; cur; cur = work[*cur].parent) ++depth;
      if (!best || depth > best_depth) {
        best = id;
        best_depth = depth;
      }
    }
    if (best) commit({{*best, std::nullopt, {{"role", "main"}}, {}}});
  }
  return out;
}

namespace offline {

// Text-only rebuild.
class Regenerator {
 public:
  explicit Regenerator(const Document& src) : src_(src) {}

  std::string run() {
    out_ = parse("");
    NodeId html = out_.root();
    if (auto lang = text::trim(src_[src_.root()].attr_or("lang")); !lang.empty())
      out_.node(html).set_attr("lang", std::string(lang));
    NodeId head = *out_.head();
    NodeId meta = out_.create_element("meta", {{"charset", "utf-8"}});
    out_.append_child(head, meta);
    std::string title_text;
    for (NodeId t : src_.elements_by_tag("title")) {
      title_text = a11y::text_content(src_, t);
      break;
    }
    if (!title_text.empty()) {
      NodeId title = out_.create_element("title");
      out_.append_child(head, title);
      out_.append_child(title, out_.create_text(title_text));
    }

    NodeId body = *out_.body();
    main_ = out_.create_element("main");
    out_.append_child(body, main_);

    for (NodeId id : rendered_elements(src_))
      if (src_[id].is_element("h1")) {
        first_h1_ = id;
        break;
      }
    for (const auto& group : category_groups(src_, true)) {
      if (first_h1_ && std::find(group.begin(), group.end(), *first_h1_) != group.end()) continue;
      group_at_[group.front()] = group;
      for (NodeId h : group) in_group_.insert(h);
    }

    if (first_h1_ || !title_text.empty()) {
      NodeId h1 = out_.create_element("h1");
      out_.append_child(main_, h1);
      if (first_h1_) {
        copy_label(src_[*first_h1_], h1);
        Sink s{h1, true, false, std::nullopt};
        children(*first_h1_, s);
      } else {
        out_.append_child(h1, out_.create_text(title_text));
      }
      if (!has_content(h1)) out_.remove(h1);
      else previous_level_ = 1;
    }

    Sink top{main_, false, true, std::nullopt};
    if (auto src_body = src_.body()) children(*src_body, top);
    fix_references();
    return serialize(out_);
  }

 private:
  struct Sink {
    NodeId container;
    bool inline_only = false;      // phrasing context
    bool wraps_paragraphs = false;  // loose inline content goes into <p>
    std::optional<NodeId> paragraph;
  };

  static bool drop_tag(std::string_view t) {
    return t == "script" || t == "style" || t == "noscript" || t == "template" || t == "head" ||
           t == "title" || t == "iframe" || t == "object" || t == "embed" || t == "canvas" ||
           t == "svg" || t == "video" || t == "audio" || t == "map" || t == "area" ||
           t == "link" || t == "meta" || t == "source" || t == "track" || t == "picture";
  }

  static bool block_keep(std::string_view t) {
    static const std::set<std::string_view> k = {
        "p",       "ul",        "ol",      "li",     "dl",         "dt",    "dd",
        "table",   "thead",     "tbody",   "tfoot",  "tr",         "td",    "th",
        "caption", "blockquote", "form",   "fieldset", "legend",   "section", "article",
        "aside",   "nav",       "header",  "footer", "figure",     "figcaption", "details",
        "summary", "pre",       "address", "hr"};
    return k.count(t) > 0;
  }

  // Blocks whose loose inline content is wrapped in paragraphs.
  static bool sectioning(std::string_view t) {
    return t == "section" || t == "article" || t == "aside" || t == "nav" || t == "header" ||
           t == "footer" || t == "blockquote" || t == "form" || t == "fieldset" ||
           t == "details" || t == "figure" || t == "address";
  }

  static bool phrasing_block(std::string_view t) {
    return t == "p" || t == "pre" || t == "dt" || t == "caption" || t == "legend" ||
           t == "summary" || t == "figcaption";
  }

  static bool inline_keep(std::string_view t) {
    static const std::set<std::string_view> k = {
        "a",    "button", "label", "input", "select", "option", "optgroup", "textarea",
        "strong", "em",   "b",     "i",     "code",   "small",  "sub",      "sup",
        "q",    "cite",   "mark",  "abbr",  "time",   "s",      "del",      "ins",
        "u",    "kbd",    "var",   "output", "data"};
    return k.count(t) > 0;
  }

  static bool inline_transparent(std::string_view t) {
    return t == "span" || t == "font" || t == "bdi" || t == "bdo" || t == "nobr" || t == "wbr";
  }

  static std::vector<std::string_view> allowed_attributes(std::string_view tag) {
    std::vector<std::string_view> a = {"id", "aria-label", "aria-labelledby", "aria-describedby",
                                       "lang", "dir"};
    auto add = [&](std::initializer_list<std::string_view> more) {
      a.insert(a.end(), more.begin(), more.end());
    };
    if (tag == "a") add({"href", "title", "hreflang"});
    if (tag == "button") add({"type", "name", "value", "disabled", "title"});
    if (tag == "input")
      add({"type", "name", "value", "placeholder", "checked", "required", "disabled", "min",
           "max", "step", "alt", "autocomplete", "title", "multiple", "pattern", "maxlength"});
    if (tag == "select") add({"name", "multiple", "required", "disabled", "title"});
    if (tag == "option" || tag == "optgroup") add({"value", "selected", "label", "disabled"});
    if (tag == "textarea") add({"name", "rows", "cols", "placeholder", "required", "title"});
    if (tag == "form") add({"action", "method", "enctype"});
    if (tag == "label") add({"for"});
    if (tag == "td" || tag == "th") add({"colspan", "rowspan", "scope", "headers"});
    if (tag == "ol") add({"start", "reversed", "type"});
    if (tag == "li") add({"value"});
    if (tag == "time") add({"datetime"});
    if (tag == "abbr") add({"title"});
    if (tag == "details") add({"open"});
    if (tag == "blockquote" || tag == "q") add({"cite"});
    if (tag == "data") add({"value"});
    return a;
  }

  NodeId make(const DomNode& src, std::string_view tag) {
    std::vector<Attribute> attrs;
    for (auto name : allowed_attributes(tag))
      if (const auto* v = src.attr(name)) attrs.push_back({std::string(name), *v});
    return out_.create_element(tag, std::move(attrs));
  }

  void copy_label(const DomNode& src, NodeId dst) {
    if (auto v = text::collapse(src.attr_or("aria-label")); !v.empty())
      out_.node(dst).set_attr("aria-label", v);
  }

  bool has_content(NodeId id) const {
    const DomNode& n = out_[id];
    if (n.has_attr("aria-label")) return true;
    bool found = false;
    out_.walk(id, [&](const DomNode& d) {
      if (found) return false;
      if (d.is_text() && !text::is_blank(d.text)) found = true;
      if (d.is_element() && d.id != id &&
          (d.is_element("input") || d.is_element("select") || d.is_element("textarea") ||
           d.is_element("button") || d.is_element("hr") || d.is_element("a")))
        found = true;
      return !found;
    });
    return found;
  }

  void add_text(NodeId parent, std::string_view value) {
    auto& kids = out_.node(parent).children;
    if (!kids.empty() && out_[kids.back()].is_text()) {
      out_.node(kids.back()).text.append(value);
      return;
    }
    out_.append_child(parent, out_.create_text(std::string(value)));
  }

  NodeId inline_target(Sink& s) {
    if (s.inline_only || !s.wraps_paragraphs) return s.container;
    if (!s.paragraph) {
      s.paragraph = out_.create_element("p");
      out_.append_child(s.container, *s.paragraph);
    }
    return *s.paragraph;
  }

  void close_paragraph(Sink& s) {
    if (s.paragraph && !has_content(*s.paragraph)) out_.remove(*s.paragraph);
    s.paragraph.reset();
  }

  void separator(Sink& s) {
    if (s.inline_only || s.paragraph) add_text(inline_target(s), " ");
  }

  void children(NodeId src, Sink& s) {
    for (NodeId c : src_[src].children) node(c, s);
    if (!s.inline_only) close_paragraph(s);
  }

  int renumber(int level) {
    if (level == 1) level = 2;  // only one h1 per page
    if (previous_level_ > 0 && level > previous_level_ + 1) level = previous_level_ + 1;
    previous_level_ = level;
    return level;
  }

  void categories(const std::vector<NodeId>& group, Sink& s) {
    close_paragraph(s);
    NodeId h = out_.create_element("h2");
    out_.append_child(s.container, h);
    out_.append_child(h, out_.create_text("Categories"));
    previous_level_ = 2;
    NodeId ul = out_.create_element("ul");
    out_.append_child(s.container, ul);
    for (NodeId heading : group) {
      NodeId link = *category_link(src_, heading);
      NodeId li = out_.create_element("li");
      out_.append_child(ul, li);
      NodeId a = make(src_[link], "a");
      out_.append_child(li, a);
      out_.append_child(a, out_.create_text(a11y::visible_text(src_, heading)));
    }
  }

  void node(NodeId id, Sink& s) {
    const DomNode& n = src_[id];
    if (n.is_text()) {
      if (html::is_raw_text(src_[*n.parent].tag)) return;
      if (text::is_blank(n.text)) {
        if (s.inline_only || s.paragraph) add_text(inline_target(s), " ");
        return;
      }
      add_text(inline_target(s), n.text);
      return;
    }
    if (!n.is_element()) return;
    const std::string& tag = n.tag;
    if (n.is_element("input") && text::iequals(text::trim(n.attr_or("type")), "hidden")) {
      out_.append_child(inline_target(s), make(n, "input"));
      return;
    }
    if (drop_tag(tag) || a11y::hides_subtree(n)) return;

    if (html::is_heading(n)) {
      if (first_h1_ && id == *first_h1_) return;
      if (in_group_.count(id)) {
        if (auto g = group_at_.find(id); g != group_at_.end()) categories(g->second, s);
        return;
      }
      if (s.inline_only) {
        separator(s);
        children(id, s);
        separator(s);
        return;
      }
      close_paragraph(s);
      NodeId h = out_.create_element("h" + std::to_string(html::heading_level(tag)));
      copy_label(n, h);
      Sink inner{h, true, false, std::nullopt};
      children(id, inner);
      if (!has_content(h)) {
        out_.remove(h);
        return;
      }
      out_.node(h).tag = "h" + std::to_string(renumber(html::heading_level(tag)));
      out_.append_child(s.container, h);
      return;
    }
    if (n.is_element("img")) {
      if (auto alt = text::collapse(n.attr_or("alt")); !alt.empty()) {
        separator(s);
        add_text(inline_target(s), alt);
        separator(s);
      }
      return;
    }
    if (n.is_element("br")) {
      separator(s);
      return;
    }
    const bool role_button = !n.is_element("button") && a11y::has_role(n, "button") &&
                             !a11y::is_link(n) && !n.is_element("input");
    if (role_button || (inline_keep(tag) && !(n.is_element("a") && !n.has_attr("href")))) {
      NodeId el = make(n, role_button ? "button" : tag);
      if (role_button) out_.node(el).set_attr("type", "button");
      NodeId parent = inline_target(s);
      out_.append_child(parent, el);
      Sink inner{el, true, false, std::nullopt};
      children(id, inner);
      const bool keep_empty = a11y::is_form_control(out_[el]) || out_[el].is_element("a") ||
                              out_[el].is_element("option");
      if (!keep_empty && !has_content(el)) out_.remove(el);
      return;
    }
    if (inline_transparent(tag) || n.is_element("a")) {
      children(id, s);
      return;
    }
    if (block_keep(tag)) {
      if (s.inline_only) {
        separator(s);
        children(id, s);
        separator(s);
        return;
      }
      close_paragraph(s);
      NodeId el = make(n, tag);
      out_.append_child(s.container, el);
      Sink inner{el, phrasing_block(tag), sectioning(tag), std::nullopt};
      children(id, inner);
      if (!n.is_element("hr") && !has_content(el)) out_.remove(el);
      return;
    }
    // Layout containers (div, main, center, custom elements) are dissolved.
    if (s.inline_only) {
      separator(s);
      children(id, s);
      separator(s);
      return;
    }
    close_paragraph(s);
    children(id, s);
    close_paragraph(s);
  }

  // Drops repeated ids and ARIA references that no longer resolve.
  void fix_references() {
    std::set<std::string> ids;
    for (NodeId id : out_.document_order()) {
      DomNode& n = out_.node(id);
      if (!n.is_element()) continue;
      if (const auto* v = n.attr("id")) {
        if (v->empty() || !ids.insert(*v).second) n.remove_attr("id");
      }
    }
    for (NodeId id : out_.document_order()) {
      DomNode& n = out_.node(id);
      if (!n.is_element()) continue;
      for (std::string_view attr : {"aria-labelledby", "aria-describedby"}) {
        const auto* v = n.attr(attr);
        if (!v) continue;
        std::vector<std::string> kept;
        for (auto& tok : text::split_ws(*v))
          if (ids.count(tok)) kept.push_back(tok);
        if (kept.empty())
          n.remove_attr(attr);
        else
          n.set_attr(attr, text::join(kept, " "));
      }
    }
  }

  const Document& src_;
  Document out_;
  NodeId main_{};
  std::optional<NodeId> first_h1_;
  std::map<NodeId, std::vector<NodeId>> group_at_;
  std::set<NodeId> in_group_;
  int previous_level_ = 0;
};

}  // namespace offline

/// Deterministic text-only rebuild: title kept, one h1 at the top of a main
/// landmark, headings renumbered without skips, images replaced by their
/// alt text, scripts and styles dropped, runs of three or more link-only
/// headings collapsed into one "Categories" list, everything else in
/// document order.
inline std::string offline_regenerate(const Document& doc) {
  return offline::Regenerator(doc).run();
}

}  // namespace restruct

#endif  // RESTRUCT_OFFLINE_HPP_
