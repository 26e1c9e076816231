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

// Rule-based Level-A style checker.
//
// Twelve fixed rules. Element rules look only at rendered content inside
// body (hidden subtrees are skipped, as assistive technology skips them);
// DUP-ID, ARIA-ROLE and ARIA-REF look at every element outside <template>.
// One violation per offending node, or per document for the document rules.

#ifndef RESTRUCT_AUDIT_HPP_
#define RESTRUCT_AUDIT_HPP_

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "restruct/dom.hpp"
#include "restruct/extract.hpp"

namespace restruct {

struct Rule {
  std::string_view rule_id;
  std::string_view description;
  std::string_view wcag_ref;
};

inline constexpr std::array<Rule, 12> kRules = {{
    {"H-ORDER", "Heading level increases by more than one", "1.3.1 Info and Relationships"},
    {"H-EMPTY", "Heading has no accessible text", "1.3.1 Info and Relationships"},
    {"IMG-ALT", "Image lacks an alt attribute", "1.1.1 Non-text Content"},
    {"CTRL-NAME", "Button has no accessible name", "4.1.2 Name, Role, Value"},
    {"LINK-NAME", "Link has no accessible name", "2.4.4 Link Purpose (In Context)"},
    {"DOC-TITLE", "Document has no non-empty title", "2.4.2 Page Titled"},
    {"HTML-LANG", "html element has no lang attribute", "3.1.1 Language of Page"},
    {"DUP-ID", "id attribute value is repeated", "4.1.1 Parsing"},
    {"LABEL-CTRL", "Form field has no label", "1.3.1 Info and Relationships"},
    {"ARIA-ROLE", "role value is not a WAI-ARIA role", "4.1.2 Name, Role, Value"},
    {"ARIA-REF", "ARIA reference points to no element", "1.3.1 Info and Relationships"},
    {"LANDMARK-MAIN", "Document has no main landmark", "1.3.1 Info and Relationships"},
}};

struct Violation {
  std::string rule_id;
  std::string path;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct AuditReport {
  std::vector<Violation> violations;
  std::size_t instance_count = 0;
  std::size_t distinct_rule_count = 0;

  std::size_t count(std::string_view rule) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [&](const Violation& v) { return v.rule_id == rule; }));
  }

  friend bool operator==(const AuditReport&, const AuditReport&) = default;
};

namespace audit {

// WAI-ARIA 1.2 concrete roles (abstract roles are not allowed in markup).
inline constexpr std::string_view kAriaRoles[] = {
    "alert",        "alertdialog",   "application",    "article",     "banner",
    "blockquote",   "button",        "caption",        "cell",        "checkbox",
    "code",         "columnheader",  "combobox",       "complementary", "contentinfo",
    "definition",   "deletion",      "dialog",         "directory",   "document",
    "emphasis",     "feed",          "figure",         "form",        "generic",
    "grid",         "gridcell",      "group",          "heading",     "img",
    "insertion",    "link",          "list",           "listbox",     "listitem",
    "log",          "main",          "marquee",        "math",        "menu",
    "menubar",      "menuitem",      "menuitemcheckbox", "menuitemradio", "meter",
    "navigation",   "none",          "note",           "option",      "paragraph",
    "presentation", "progressbar",   "radio",          "radiogroup",  "region",
    "row",          "rowgroup",      "rowheader",      "scrollbar",   "search",
    "searchbox",    "separator",     "slider",         "spinbutton",  "status",
    "strong",       "subscript",     "superscript",    "switch",      "tab",
    "table",        "tablist",       "tabpanel",       "term",        "textbox",
    "time",         "timer",         "toolbar",        "tooltip",     "tree",
    "treegrid",     "treeitem",
};

inline bool is_aria_role(std::string_view role) {
  auto r = text::lower(role);
  return std::find(std::begin(kAriaRoles), std::end(kAriaRoles), r) != std::end(kAriaRoles);
}

inline bool is_text_entry(const DomNode& n) {
  if (n.is_element("select") || n.is_element("textarea")) return true;
  if (!n.is_element("input")) return false;
  auto type = text::lower(text::trim(n.attr_or("type")));
  static constexpr std::string_view kNonText[] = {
      "hidden", "submit", "reset", "button", "image", "checkbox",
      "radio",  "file",   "color", "range"};
  return std::find(std::begin(kNonText), std::end(kNonText), type) == std::end(kNonText);
}

inline std::size_t rule_index(std::string_view id) {
  for (std::size_t i = 0; i < kRules.size(); ++i)
    if (kRules[i].rule_id == id) return i;
  return kRules.size();
}

}  // namespace audit

inline AuditReport run_audit(const Document& doc) {
  struct Hit {
    std::size_t position;
    std::size_t rule;
    Violation v;
  };
  std::vector<Hit> hits;
  std::unordered_map<NodeId, std::size_t> position;
  std::unordered_set<std::string> ids;

  // Pass 1: document positions and the id set (outside templates).
  std::size_t pos = 0;
  doc.walk(doc.root(), [&](const DomNode& n) {
    position[n.id] = pos++;
    if (n.is_element("template")) return false;
    if (n.is_element())
      if (const auto* id = n.attr("id"); id && !id->empty()) ids.insert(*id);
    return true;
  });

  auto report = [&](std::string_view rule, NodeId id, std::string message) {
    hits.push_back({position.at(id), audit::rule_index(rule),
                    Violation{std::string(rule), node_path(doc, id), std::move(message)}});
  };

  const DomNode& html = doc[doc.root()];
  if (text::trim(html.attr_or("lang")).empty())
    report("HTML-LANG", html.id, "html element has no lang attribute");

  {
    std::optional<NodeId> title;
    doc.walk(doc.root(), [&](const DomNode& n) {
      if (!title && n.is_element("title")) title = n.id;
      return !title && !n.is_element("template");
    });
    if (!title) {
      report("DOC-TITLE", doc.head().value_or(doc.root()), "document has no title element");
    } else if (a11y::text_content(doc, *title).empty()) {
      report("DOC-TITLE", *title, "title element is empty");
    }
  }

  // Document-wide attribute rules.
  std::unordered_set<std::string> seen_ids;
  bool has_main = false;
  doc.walk(doc.root(), [&](const DomNode& n) {
    if (!n.is_element()) return false;
    if (n.is_element("template")) return false;
    if (n.is_element("main") || a11y::has_role(n, "main")) has_main = true;
    if (const auto* id = n.attr("id"); id && !id->empty()) {
      if (!seen_ids.insert(*id).second)
        report("DUP-ID", n.id, "id \"" + *id + "\" is already used");
    }
    if (const auto* role = n.attr("role")) {
      for (const auto& tok : text::split_ws(*role)) {
        if (!audit::is_aria_role(tok)) {
          report("ARIA-ROLE", n.id, "unknown role \"" + tok + "\"");
          break;
        }
      }
    }
    std::vector<std::string> dangling;
    for (std::string_view attr : {"aria-labelledby", "aria-describedby"})
      if (const auto* refs = n.attr(attr))
        for (const auto& tok : text::split_ws(*refs))
          if (!ids.count(tok)) dangling.push_back(tok);
    if (!dangling.empty())
      report("ARIA-REF", n.id, "unresolved reference \"" + text::join(dangling, " ") + "\"");
    return true;
  });

  // Rendered-content rules, body only.
  int previous_level = 0;
  if (auto body = doc.body()) {
    doc.walk(*body, [&](const DomNode& n) {
      if (!n.is_element()) return false;
      if (a11y::is_non_rendered_tag(n.tag) || a11y::hides_subtree(n)) return false;
      if (int level = html::heading_level(n.tag); level > 0) {
        if (previous_level > 0 && level > previous_level + 1)
          report("H-ORDER", n.id,
                 "h" + std::to_string(level) + " follows h" + std::to_string(previous_level));
        previous_level = level;
        if (!accessible_name(doc, n.id)) report("H-EMPTY", n.id, "heading has no text");
      }
      if (n.is_element("img") && !n.has_attr("alt"))
        report("IMG-ALT", n.id, "img has no alt attribute");
      if (a11y::is_button(n) && !accessible_name(doc, n.id))
        report("CTRL-NAME", n.id, "button has no accessible name");
      if (a11y::is_link(n) && !accessible_name(doc, n.id))
        report("LINK-NAME", n.id, "link has no accessible name");
      if (audit::is_text_entry(n)) {
        bool labelled = !text::collapse(n.attr_or("aria-label")).empty() ||
                        !a11y::labelledby_text(doc, n).empty();
        if (!labelled) {
          if (const auto* id = n.attr("id"); id && !id->empty()) {
            doc.walk(doc.root(), [&](const DomNode& d) {
              if (d.is_element("label") && d.attr_or("for") == *id) labelled = true;
              return !labelled;
            });
          }
        }
        for (auto cur = n.parent; !labelled && cur; cur = doc[*cur].parent)
          if (doc[*cur].is_element("label")) labelled = true;
        if (!labelled) report("LABEL-CTRL", n.id, n.tag + " has no associated label");
      }
      return true;
    });
    if (!has_main) report("LANDMARK-MAIN", *body, "no main landmark");
  }

  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return a.position != b.position ? a.position < b.position : a.rule < b.rule;
  });
  AuditReport out;
  std::set<std::string> distinct;
  for (auto& h : hits) {
    distinct.insert(h.v.rule_id);
    out.violations.push_back(std::move(h.v));
  }
  out.instance_count = out.violations.size();
  out.distinct_rule_count = distinct.size();
  return out;
}

struct RuleDelta {
  std::string rule_id;
  long before = 0;
  long after = 0;
  long delta = 0;
};

struct AuditDiff {
  std::vector<RuleDelta> per_rule;  // every rule in rule-set order
  long total_before = 0;
  long total_after = 0;
  long total_delta = 0;
  long distinct_before = 0;
  long distinct_after = 0;
};

/// Per-rule instance deltas (after - before); negative is an improvement.
inline AuditDiff diff_reports(const AuditReport& before, const AuditReport& after) {
  AuditDiff d;
  for (const auto& rule : kRules) {
    RuleDelta r{std::string(rule.rule_id), static_cast<long>(before.count(rule.rule_id)),
                static_cast<long>(after.count(rule.rule_id)), 0};
    r.delta = r.after - r.before;
    d.per_rule.push_back(std::move(r));
  }
  d.total_before = static_cast<long>(before.instance_count);
  d.total_after = static_cast<long>(after.instance_count);
  d.total_delta = d.total_after - d.total_before;
  d.distinct_before = static_cast<long>(before.distinct_rule_count);
  d.distinct_after = static_cast<long>(after.distinct_rule_count);
  return d;
}

inline nlohmann::ordered_json to_json(const AuditReport& r) {
  nlohmann::ordered_json j;
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : r.violations)
    j["violations"].push_back({{"rule", v.rule_id}, {"path", v.path}, {"message", v.message}});
  j["instances"] = r.instance_count;
  j["distinct_rules"] = r.distinct_rule_count;
  return j;
}

inline AuditReport audit_report_from_json(const nlohmann::json& j) {
  AuditReport r;
  for (const auto& v : j.at("violations"))
    r.violations.push_back({v.at("rule").get<std::string>(), v.at("path").get<std::string>(),
                            v.at("message").get<std::string>()});
  r.instance_count = j.at("instances").get<std::size_t>();
  r.distinct_rule_count = j.at("distinct_rules").get<std::size_t>();
  return r;
}

inline nlohmann::ordered_json to_json(const AuditDiff& d) {
  nlohmann::ordered_json j;
  j["per_rule"] = nlohmann::ordered_json::object();
  for (const auto& r : d.per_rule)
    j["per_rule"][r.rule_id] = {{"before", r.before}, {"after", r.after}, {"delta", r.delta}};
  j["before"] = d.total_before;
  j["after"] = d.total_after;
  j["delta"] = d.total_delta;
  j["distinct_before"] = d.distinct_before;
  j["distinct_after"] = d.distinct_after;
  return j;
}

}  // namespace restruct

#endif  // RESTRUCT_AUDIT_HPP_
