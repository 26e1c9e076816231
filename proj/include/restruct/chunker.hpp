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

// Token-budgeted splitting of a document at element boundaries, and the
// reverse: stitching generated fragments back into one page.
//
// Packing is greedy over body's children. A child that does not fit on its
// own is split over its own children; the fragments for those carry the
// open/close tags of every ancestor below body so each fragment parses in
// context. The first fragment of an ancestor carries its full start tag;
// later ones drop naming attributes (id, aria-label, aria-labelledby,
// aria-describedby, title) so a stitched page does not repeat them. A text
// node that alone exceeds the budget is cut at whitespace into pieces.

#ifndef RESTRUCT_CHUNKER_HPP_
#define RESTRUCT_CHUNKER_HPP_

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "restruct/dom.hpp"
#include "restruct/html_parser.hpp"
#include "restruct/text.hpp"

namespace restruct {

inline constexpr std::size_t kMinChunkBudget = 16;
inline constexpr std::size_t kDefaultChunkBudget = 24000;

/// ceil(bytes / 4).
inline std::size_t estimate_tokens(std::string_view s) noexcept { return (s.size() + 3) / 4; }

using TokenCounter = std::function<std::size_t(std::string_view)>;

struct Chunk {
  std::size_t index = 0;  // 1-based
  std::string html;
  std::size_t token_estimate = 0;
  std::string ancestor_path;
  std::vector<NodeId> covered_ids;  // contiguous siblings under ancestor_path
  bool oversize = false;
  /// Set when this chunk is one piece of a text node too large for the budget.
  std::optional<NodeId> split_text;
};

struct ChunkOptions {
  std::size_t budget = kDefaultChunkBudget;
  /// Prefix chunk 1 with the serialized <head> when it has content.
  bool include_head = true;
  TokenCounter counter = estimate_tokens;
};

class ChunkError : public Error {
 public:
  using Error::Error;
};

namespace detail {

class Chunker {
 public:
  Chunker(const Document& doc, const ChunkOptions& opts) : doc_(doc), opts_(opts) {}

  std::vector<Chunk> run() {
    auto body = doc_.body();
    if (!body) return {};
    std::string head_html;
    if (opts_.include_head)
      if (auto head = doc_.head(); head && !doc_[*head].children.empty())
        head_html = html::serialize_node(doc_, *head);
    pack(*body, {}, head_html);
    for (std::size_t i = 0; i < chunks_.size(); ++i) chunks_[i].index = i + 1;
    return std::move(chunks_);
  }

 private:
  std::size_t count(std::string_view s) const { return opts_.counter(s); }

  std::string open_tags(const std::vector<NodeId>& ancestors, bool full) const {
    std::string out;
    for (NodeId a : ancestors) {
      DomNode copy = doc_[a];
      if (!full && opened_.count(a)) {
        for (std::string_view drop :
             {"id", "aria-label", "aria-labelledby", "aria-describedby", "title"})
          copy.remove_attr(drop);
      }
      out += html::start_tag(copy);
    }
    return out;
  }

  std::string close_tags(const std::vector<NodeId>& ancestors) const {
    std::string out;
    for (auto it = ancestors.rbegin(); it != ancestors.rend(); ++it)
      out += html::end_tag(doc_[*it]);
    return out;
  }

  // Estimate with the full start tags, which are never shorter than the
  // reduced ones actually emitted.
  bool fits(const std::vector<NodeId>& ancestors, std::string_view inner) const {
    return count(open_tags(ancestors, true) + std::string(inner) + close_tags(ancestors)) <=
           opts_.budget;
  }

  void emit(NodeId parent, const std::vector<NodeId>& ancestors, const std::string& inner,
            std::vector<NodeId> covered, bool oversize = false,
            std::optional<NodeId> split = std::nullopt) {
    Chunk c;
    c.html = open_tags(ancestors, false) + inner + close_tags(ancestors);
    c.token_estimate = count(c.html);
    c.oversize = oversize || c.token_estimate > opts_.budget;
    c.ancestor_path = node_path(doc_, parent);
    c.covered_ids = std::move(covered);
    c.split_text = split;
    chunks_.push_back(std::move(c));
    for (NodeId a : ancestors) opened_.insert(a);
  }

  void pack(NodeId parent, const std::vector<NodeId>& ancestors, const std::string& seed) {
    std::string group = seed;
    std::vector<NodeId> members;
    bool has_content = !seed.empty();
    auto flush = [&] {
      if (has_content) emit(parent, ancestors, group, members);
      group.clear();
      members.clear();
      has_content = false;
    };
    for (NodeId child : doc_[parent].children) {
      const DomNode& n = doc_[child];
      std::string s = html::serialize_node(doc_, child);
      const bool blank = n.is_text() && text::is_blank(n.text);
      if (blank) {
        // Whitespace only rides along; it never opens a chunk of its own.
        if (has_content && fits(ancestors, group + s)) {
          group += s;
          members.push_back(child);
        }
        continue;
      }
      if (fits(ancestors, group + s)) {
        group += s;
        members.push_back(child);
        has_content = true;
        continue;
      }
      flush();
      if (fits(ancestors, s)) {
        group = s;
        members = {child};
        has_content = true;
        continue;
      }
      if (n.is_element() && !n.children.empty()) {
        auto deeper = ancestors;
        deeper.push_back(child);
        pack(child, deeper, {});
      } else if (n.is_text()) {
        split_text(parent, ancestors, n);
      } else {
        emit(parent, ancestors, s, {child}, true);
      }
    }
    flush();
  }

  void split_text(NodeId parent, const std::vector<NodeId>& ancestors, const DomNode& n) {
    const bool raw = html::is_raw_text(doc_[parent].tag);
    auto render = [&](std::string_view piece) {
      return raw ? std::string(piece) : html::escape_text(piece);
    };
    // Words keep their trailing whitespace so pieces re-join losslessly.
    std::vector<std::string_view> words;
    std::string_view t = n.text;
    std::size_t i = 0;
    while (i < t.size()) {
      std::size_t start = i;
      while (i < t.size() && !text::is_space(t[i])) ++i;
      while (i < t.size() && text::is_space(t[i])) ++i;
      words.push_back(t.substr(start, i - start));
    }
    std::string piece;
    for (auto w : words) {
      std::string candidate = piece + std::string(w);
      if (piece.empty() || fits(ancestors, render(candidate))) {
        piece = std::move(candidate);
        continue;
      }
      emit(parent, ancestors, render(piece), {n.id}, false, n.id);
      piece = std::string(w);
    }
    if (!piece.empty()) emit(parent, ancestors, render(piece), {n.id}, false, n.id);
  }

  const Document& doc_;
  const ChunkOptions& opts_;
  std::vector<Chunk> chunks_;
  std::unordered_set<NodeId> opened_;
};

}  // namespace detail

/// Splits the document body into chunks whose estimate stays within the
/// budget; see the file comment for the packing rule.
inline std::vector<Chunk> chunk_document(const Document& doc, const ChunkOptions& opts) {
  if (opts.budget < kMinChunkBudget)
    throw ChunkError("chunk budget " + std::to_string(opts.budget) + " is below the minimum of " +
                     std::to_string(kMinChunkBudget));
  return detail::Chunker(doc, opts).run();
}

inline std::vector<Chunk> chunk_document(const Document& doc, std::size_t budget) {
  ChunkOptions opts;
  opts.budget = budget;
  return chunk_document(doc, opts);
}

/// Non-whitespace text nodes covered by a chunk.
inline std::vector<NodeId> covered_text_ids(const Document& doc, const Chunk& chunk) {
  std::vector<NodeId> out;
  for (NodeId root : chunk.covered_ids)
    doc.walk(root, [&](const DomNode& n) {
      if (n.is_text() && !text::is_blank(n.text)) out.push_back(n.id);
      return true;
    });
  return out;
}

namespace detail {

inline bool looks_like_document(std::string_view s) {
  for (std::size_t pos = s.find('<'); pos != std::string_view::npos; pos = s.find('<', pos + 1)) {
    auto rest = s.substr(pos + 1);
    if (text::istarts_with(rest, "html") || text::istarts_with(rest, "head") ||
        text::istarts_with(rest, "body") || text::istarts_with(rest, "!doctype"))
      return true;
  }
  return false;
}

}  // namespace detail

/// Joins generated fragments into one document: the first fragment's html
/// attributes and head win, body children are concatenated in order, and
/// one <title> survives in head: the first fragment's head title, else the
/// first head title of a later fragment, else the first title in any body.
inline std::string stitch(const std::vector<std::string>& fragments) {
  Document out = parse("");
  NodeId out_head = *out.head();
  NodeId out_body = *out.body();
  std::optional<NodeId> fallback_title;
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    Document d = detail::looks_like_document(fragments[i]) ? parse(fragments[i])
                                                           : parse_fragment(fragments[i]);
    if (i == 0) {
      out.node(out.root()).attributes = d[d.root()].attributes;
      for (NodeId c : d[*d.head()].children) out.append_child(out_head, clone_into(d, c, out));
    } else if (!fallback_title) {
      if (auto t = d.child_element(*d.head(), "title")) fallback_title = clone_into(d, *t, out);
    }
    for (NodeId c : d[*d.body()].children) out.append_child(out_body, clone_into(d, c, out));
  }
  std::optional<NodeId> kept;
  for (NodeId t : out.elements_by_tag("title"))
    if (out[t].parent == out_head) {
      kept = t;
      break;
    }
  if (!kept) {
    auto titles = out.elements_by_tag("title");
    if (fallback_title) {
      kept = fallback_title;
    } else if (!titles.empty()) {
      kept = titles.front();
      out.detach(*kept);
    }
    if (kept) out.append_child(out_head, *kept);
  }
  for (NodeId t : out.elements_by_tag("title"))
    if (t != kept) out.remove(t);
  return serialize(out);
}

}  // namespace restruct

#endif  // RESTRUCT_CHUNKER_HPP_
