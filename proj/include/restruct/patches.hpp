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

// Element records sent to the model in reorganize mode, and the tag patches
// it sends back. A patch renames an element and/or edits its attributes;
// it never touches children or text.

#ifndef RESTRUCT_PATCHES_HPP_
#define RESTRUCT_PATCHES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "restruct/chunker.hpp"
#include "restruct/dom.hpp"
#include "restruct/extract.hpp"
#include "restruct/llm.hpp"

namespace restruct {

struct TagRecord {
  NodeId node;
  std::string tag;
  std::optional<std::string> id_attr;
  std::vector<std::string> classes;
  std::vector<std::pair<std::string, std::string>> attributes;  // without id/class
  std::string text;  // direct child text, collapsed
};

struct TagPatch {
  NodeId node;
  std::optional<std::string> new_tag;
  std::vector<std::pair<std::string, std::string>> set_attributes;
  std::vector<std::string> remove_attributes;

  bool empty() const noexcept {
    return !new_tag && set_attributes.empty() && remove_attributes.empty();
  }
  friend bool operator==(const TagPatch&, const TagPatch&) = default;
};

namespace patches {

inline bool record_worthy(const DomNode& n) {
  return html::is_heading(n) || n.is_element("a") || n.is_element("button") ||
         n.is_element("img") || a11y::is_form_control(n);
}

inline bool valid_tag_name(std::string_view t) {
  if (t.empty() || !(t[0] >= 'a' && t[0] <= 'z')) return false;
  for (char c : t)
    if (!((c >= 'a' && c <= 'z') || text::is_digit(c) || c == '-')) return false;
  return true;
}

inline bool valid_attribute_name(std::string_view a) {
  if (a.empty()) return false;
  char f = a[0];
  if (!((f >= 'a' && f <= 'z') || f == '_' || f == ':')) return false;
  for (char c : a)
    if (!((c >= 'a' && c <= 'z') || text::is_digit(c) || c == '-' || c == '_' || c == ':' ||
          c == '.'))
      return false;
  return true;
}

// Tags a patch may never introduce: they change parsing or rendering of the
// element's content, or the document skeleton.
inline bool forbidden_target(std::string_view t) {
  return t == "html" || t == "head" || t == "body" || t == "title" || t == "template" ||
         t == "textarea" || html::is_raw_text(t);
}

}  // namespace patches

/// Records for elements with direct text, and for every heading, link,
/// button, image and form control, in document order. Only body content
/// outside script/style/noscript/template is considered.
inline std::vector<TagRecord> tag_records(const Document& doc) {
  std::vector<TagRecord> out;
  auto body = doc.body();
  if (!body) return out;
  doc.walk(*body, [&](const DomNode& n) {
    if (!n.is_element()) return false;
    if (n.tag == "script" || n.tag == "style" || n.tag == "noscript" || n.tag == "template")
      return false;
    if (n.id == *body) return true;
    std::string direct;
    for (NodeId c : n.children)
      if (doc[c].is_text()) direct += doc[c].text;
    direct = text::collapse(direct);
    if (direct.empty() && !patches::record_worthy(n)) return true;
    TagRecord r{n.id, n.tag, std::nullopt, {}, {}, std::move(direct)};
    for (const auto& a : n.attributes) {
      if (a.name == "id")
        r.id_attr = a.value;
      else if (a.name == "class")
        r.classes = text::split_ws(a.value);
      else
        r.attributes.emplace_back(a.name, a.value);
    }
    out.push_back(std::move(r));
    return true;
  });
  return out;
}

inline nlohmann::ordered_json to_json(const TagRecord& r) {
  nlohmann::ordered_json j;
  j["node"] = r.node.value;
  j["tag"] = r.tag;
  j["id"] = r.id_attr ? nlohmann::ordered_json(*r.id_attr) : nlohmann::ordered_json(nullptr);
  j["classes"] = r.classes;
  j["attributes"] = nlohmann::ordered_json::array();
  for (const auto& [k, v] : r.attributes) j["attributes"].push_back({k, v});
  j["text"] = r.text;
  return j;
}

/// JSON array of the document's tag records; byte-stable for a document.
inline std::string serialize_tag_records(const Document& doc) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : tag_records(doc)) arr.push_back(to_json(r));
  return arr.dump();
}

/// Packs serialized records into JSON-array chunks within the budget.
inline std::vector<Chunk> chunk_records(const std::vector<TagRecord>& records,
                                        std::size_t budget,
                                        const TokenCounter& counter = estimate_tokens) {
  if (budget < kMinChunkBudget) throw ChunkError("chunk budget below minimum");
  std::vector<Chunk> out;
  std::string body;
  std::vector<NodeId> ids;
  auto flush = [&] {
    if (ids.empty()) return;
    Chunk c;
    c.index = out.size() + 1;
    c.html = "[" + body + "]";
    c.token_estimate = counter(c.html);
    c.oversize = c.token_estimate > budget;
    c.ancestor_path = "records";
    c.covered_ids = ids;
    out.push_back(std::move(c));
    body.clear();
    ids.clear();
  };
  for (const auto& r : records) {
    std::string s = to_json(r).dump();
    std::string candidate = body.empty() ? s : body + "," + s;
    if (!ids.empty() && counter("[" + candidate + "]") > budget) {
      flush();
      candidate = s;
    }
    body = std::move(candidate);
    ids.push_back(r.node);
  }
  flush();
  return out;
}

class PatchFormatError : public Error {
 public:
  using Error::Error;
};

struct RejectedPatch {
  std::size_t index;  // position in the response array
  std::string reason;
};

struct PatchParseResult {
  std::vector<TagPatch> patches;
  std::vector<RejectedPatch> rejected;
};

namespace patches {

inline std::optional<std::string> locate_json_array(std::string_view response) {
  std::string candidate;
  if (response.find("```") != std::string_view::npos)
    candidate = extract_html_payload(response);
  else
    candidate = std::string(response);
  auto lb = candidate.find('[');
  auto rb = candidate.rfind(']');
  if (lb == std::string::npos || rb == std::string::npos || rb < lb) return std::nullopt;
  return candidate.substr(lb, rb - lb + 1);
}

inline std::optional<std::string> check_entry(const Document& doc, const nlohmann::json& e,
                                              TagPatch& out) {
  if (!e.is_object()) return "entry is not an object";
  auto node = e.find("node");
  if (node == e.end() || !node->is_number_integer() || node->get<long long>() < 0 ||
      node->get<long long>() > static_cast<long long>(UINT32_MAX))
    return "missing or invalid node";
  NodeId id{static_cast<std::uint32_t>(node->get<long long>())};
  if (!doc.contains(id) || !doc[id].is_element()) return "node is not an element of the document";
  const DomNode& n = doc[id];
  out.node = id;
  if (auto t = e.find("new_tag"); t != e.end() && !t->is_null()) {
    if (!t->is_string()) return "new_tag is not a string";
    std::string tag = t->get<std::string>();
    if (!valid_tag_name(tag)) return "invalid tag name \"" + tag + "\"";
    if (forbidden_target(tag)) return "tag \"" + tag + "\" cannot be introduced";
    if (html::is_void(n.tag) != html::is_void(tag) && !n.children.empty())
      return "cannot turn an element with children into a void element";
    if (html::is_void(n.tag) && !html::is_void(tag)) return "cannot rename a void element";
    if (forbidden_target(n.tag)) return "element \"" + n.tag + "\" cannot be renamed";
    if (tag != n.tag) out.new_tag = std::move(tag);
  }
  auto add_set = [&](const std::string& k, const std::string& v) -> std::optional<std::string> {
    auto name = text::lower(k);
    if (!valid_attribute_name(name)) return "invalid attribute name \"" + k + "\"";
    if (name.starts_with("on")) return "event handler attributes are not allowed";
    out.set_attributes.emplace_back(std::move(name), v);
    return std::nullopt;
  };
  if (auto s = e.find("set_attributes"); s != e.end() && !s->is_null()) {
    if (s->is_object()) {
      for (auto it = s->begin(); it != s->end(); ++it) {
        if (!it.value().is_string()) return "attribute value is not a string";
        if (auto err = add_set(it.key(), it.value().get<std::string>())) return err;
      }
    } else if (s->is_array()) {
      for (const auto& p : *s) {
        if (p.is_array() && p.size() == 2 && p[0].is_string() && p[1].is_string()) {
          if (auto err = add_set(p[0].get<std::string>(), p[1].get<std::string>())) return err;
        } else if (p.is_object() && p.contains("name") && p.contains("value") &&
                   p["name"].is_string() && p["value"].is_string()) {
          if (auto err = add_set(p["name"].get<std::string>(), p["value"].get<std::string>()))
            return err;
        } else {
          return "malformed set_attributes entry";
        }
      }
    } else {
      return "set_attributes must be an object or an array";
    }
  }
  if (auto r = e.find("remove_attributes"); r != e.end() && !r->is_null()) {
    if (!r->is_array()) return "remove_attributes must be an array";
    for (const auto& name : *r) {
      if (!name.is_string()) return "attribute name is not a string";
      auto lowered = text::lower(name.get<std::string>());
      if (!valid_attribute_name(lowered)) return "invalid attribute name";
      out.remove_attributes.push_back(std::move(lowered));
    }
  }
  if (out.empty()) return "patch changes nothing";
  return std::nullopt;
}

}  // namespace patches

/// Parses a model reply into patches for `doc`. Bad entries are rejected
/// one by one; a reply with no parseable JSON array throws PatchFormatError.
inline PatchParseResult parse_patches(std::string_view response, const Document& doc) {
  auto located = patches::locate_json_array(response);
  if (!located) throw PatchFormatError("no JSON array in response");
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(*located);
  } catch (const nlohmann::json::exception& e) {
    throw PatchFormatError(std::string("malformed JSON array: ") + e.what());
  }
  if (!arr.is_array()) throw PatchFormatError("response JSON is not an array");
  PatchParseResult out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    TagPatch p;
    if (auto reason = patches::check_entry(doc, arr[i], p))
      out.rejected.push_back({i, std::move(*reason)});
    else
      out.patches.push_back(std::move(p));
  }
  return out;
}

/// Applies patches in order. Throws if a patch names a node that is not an
/// element of the document; nothing is applied in that case.
inline Document apply_patches(Document doc, const std::vector<TagPatch>& list) {
  for (const auto& p : list)
    if (!doc.contains(p.node) || !doc[p.node].is_element())
      throw Error("patch references unknown element " + std::to_string(p.node.value));
  for (const auto& p : list) {
    DomNode& n = doc.node(p.node);
    if (p.new_tag) n.tag = text::lower(*p.new_tag);
    for (const auto& [k, v] : p.set_attributes) n.set_attr(k, v);
    for (const auto& k : p.remove_attributes) n.remove_attr(k);
  }
  return doc;
}

/// Patch JSON as returned to clients; `path` locates the node in the
/// original document for consumers without node ids.
inline nlohmann::ordered_json to_json(const TagPatch& p, const Document& original) {
  nlohmann::ordered_json j;
  j["node"] = p.node.value;
  j["path"] = original.contains(p.node) ? node_path(original, p.node) : std::string();
  j["new_tag"] = p.new_tag ? nlohmann::ordered_json(*p.new_tag) : nlohmann::ordered_json(nullptr);
  j["set_attributes"] = nlohmann::ordered_json::array();
  for (const auto& [k, v] : p.set_attributes) j["set_attributes"].push_back({k, v});
  j["remove_attributes"] = p.remove_attributes;
  return j;
}

}  // namespace restruct

#endif  // RESTRUCT_PATCHES_HPP_
