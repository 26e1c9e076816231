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

// Content-integrity scoring: cosine similarity of the embedded accessible
// content of two documents, the acceptance gate, and recovery of links the
// transformed page lost.

#ifndef RESTRUCT_SIMILARITY_HPP_
#define RESTRUCT_SIMILARITY_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "restruct/dom.hpp"
#include "restruct/extract.hpp"

namespace restruct {

inline constexpr double kDefaultThreshold = 0.90;

class EmbeddingError : public Error {
 public:
  using Error::Error;
};

/// Turns texts into vectors. One call embeds one comparison batch; vectors
/// within a batch share a dimension.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

/// Word tokens: ASCII case folded, split on runs of non-alphanumerics.
/// Bytes >= 0x80 count as word characters so non-Latin words survive.
inline std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (text::is_alpha(c) || text::is_digit(c) || u >= 0x80) {
      cur.push_back(text::to_lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// Term counts of one text.
inline std::map<std::string, double> lexical_embed(std::string_view s) {
  std::map<std::string, double> counts;
  for (auto& w : word_tokens(s)) counts[w] += 1.0;
  return counts;
}

/// Term-frequency vectors over the vocabulary of the whole batch.
class LexicalEmbedder final : public EmbeddingProvider {
 public:
  std::string name() const override { return "lexical"; }

  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
    std::vector<std::map<std::string, double>> bags;
    std::map<std::string, std::size_t> vocab;
    for (const auto& t : texts) {
      bags.push_back(lexical_embed(t));
      for (const auto& [w, _] : bags.back()) vocab.emplace(w, 0);
    }
    std::size_t k = 0;
    for (auto& [_, idx] : vocab) idx = k++;
    std::vector<std::vector<double>> out;
    for (const auto& bag : bags) {
      std::vector<double> v(vocab.size(), 0.0);
      for (const auto& [w, c] : bag) v[vocab.at(w)] = c;
      out.push_back(std::move(v));
    }
    return out;
  }
};

/// Cosine similarity clamped to [0, 1]. Two zero vectors count as equal.
inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw EmbeddingError("embedding dimensions differ");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 && nb == 0) return 1.0;
  if (na == 0 || nb == 0) return 0.0;
  // sqrt(na * nb) keeps identical integer-count vectors at exactly 1.0.
  double c = dot / std::sqrt(na * nb);
  return std::clamp(c, 0.0, 1.0);
}

inline double aggregated_similarity(const AccessibleContent& a, const AccessibleContent& b,
                                    EmbeddingProvider& provider) {
  if (a.concatenated.empty() && b.concatenated.empty()) return 1.0;
  if (a.concatenated.empty() || b.concatenated.empty()) return 0.0;
  auto vectors = provider.embed({a.concatenated, b.concatenated});
  if (vectors.size() != 2) throw EmbeddingError("embedding provider returned wrong batch size");
  return cosine(vectors[0], vectors[1]);
}

/// Inclusive: a score equal to the threshold passes.
inline bool gate(double score, double threshold) { return score >= threshold; }

struct MissingAnchor {
  std::string href;
  std::string text;

  friend bool operator==(const MissingAnchor&, const MissingAnchor&) = default;
  friend auto operator<=>(const MissingAnchor&, const MissingAnchor&) = default;
};

struct SimilarityReport {
  double score = 0;
  double threshold = kDefaultThreshold;
  bool pass = false;
  std::string provider;
  std::vector<MissingAnchor> missing_anchors;
};

inline SimilarityReport make_similarity_report(double score, double threshold,
                                               std::string provider,
                                               std::vector<MissingAnchor> missing = {}) {
  return SimilarityReport{score, threshold, gate(score, threshold), std::move(provider),
                          std::move(missing)};
}

/// Trims, drops the fragment and case folds scheme and host.
inline std::string normalize_href(std::string_view href) {
  std::string s(text::trim(href));
  if (auto hash = s.find('#'); hash != std::string::npos) s.resize(hash);
  auto colon = s.find(':');
  auto first_sep = s.find_first_of("/?");
  if (colon != std::string::npos && (first_sep == std::string::npos || colon < first_sep)) {
    for (std::size_t i = 0; i < colon; ++i) s[i] = text::to_lower(s[i]);
    if (s.compare(colon, 3, "://") == 0) {
      std::size_t host_start = colon + 3;
      std::size_t host_end = s.find_first_of("/?", host_start);
      if (host_end == std::string::npos) host_end = s.size();
      for (std::size_t i = host_start; i < host_end; ++i) s[i] = text::to_lower(s[i]);
    }
  } else if (s.starts_with("//")) {
    std::size_t host_end = s.find_first_of("/?", 2);
    if (host_end == std::string::npos) host_end = s.size();
    for (std::size_t i = 2; i < host_end; ++i) s[i] = text::to_lower(s[i]);
  }
  return s;
}

namespace detail {

// Rendered a[href] elements in document order.
inline std::vector<NodeId> rendered_links(const Document& doc) {
  std::vector<NodeId> out;
  doc.walk(doc.root(), [&](const DomNode& n) {
    if (!n.is_element()) return false;
    if (a11y::is_non_rendered_tag(n.tag) || a11y::hides_subtree(n)) return false;
    if (a11y::is_link(n)) out.push_back(n.id);
    return true;
  });
  return out;
}

}  // namespace detail

/// Links of `original` whose normalized href appears on no link of
/// `generated`. One entry per distinct (href, name) pair, in document order.
/// Links hidden from assistive technology are not considered.
inline std::vector<MissingAnchor> find_missing_links(const Document& original,
                                                     const Document& generated) {
  std::set<std::string> present;
  for (NodeId id : detail::rendered_links(generated))
    present.insert(normalize_href(generated[id].attr_or("href")));
  std::vector<MissingAnchor> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (NodeId id : detail::rendered_links(original)) {
    const std::string& href = original[id].attr_or("href");
    auto norm = normalize_href(href);
    if (present.count(norm)) continue;
    std::string name = accessible_name(original, id).value_or("");
    if (!seen.insert({norm, name}).second) continue;
    out.push_back({std::string(text::trim(href)), std::move(name)});
  }
  return out;
}

inline constexpr std::string_view kReinsertedHeading = "Additional links";

/// Appends a navigation list of the missing links at the end of body. Links
/// whose normalized href is already present are skipped, so calling this
/// twice with the same list changes nothing the second time.
inline Document reinsert_links(Document doc, const std::vector<MissingAnchor>& missing) {
  std::set<std::string> present;
  for (NodeId id : detail::rendered_links(doc))
    present.insert(normalize_href(doc[id].attr_or("href")));
  std::vector<const MissingAnchor*> todo;
  for (const auto& m : missing)
    if (present.insert(normalize_href(m.href)).second) todo.push_back(&m);
  if (todo.empty()) return doc;

  auto body = doc.body();
  if (!body) return doc;
  NodeId nav = doc.create_element("nav");
  doc.append_child(*body, nav);
  NodeId heading = doc.create_element("h2");
  doc.append_child(nav, heading);
  doc.append_child(heading, doc.create_text(std::string(kReinsertedHeading)));
  NodeId list = doc.create_element("ul");
  doc.append_child(nav, list);
  for (const auto* m : todo) {
    NodeId li = doc.create_element("li");
    doc.append_child(list, li);
    NodeId a = doc.create_element("a", {{"href", m->href}});
    doc.append_child(li, a);
    if (!m->text.empty()) doc.append_child(a, doc.create_text(m->text));
  }
  return doc;
}

inline nlohmann::ordered_json to_json(const SimilarityReport& r) {
  nlohmann::ordered_json j;
  j["score"] = r.score;
  j["threshold"] = r.threshold;
  j["pass"] = r.pass;
  j["provider"] = r.provider;
  j["missing_anchors"] = nlohmann::ordered_json::array();
  for (const auto& m : r.missing_anchors)
    j["missing_anchors"].push_back({{"href", m.href}, {"text", m.text}});
  return j;
}

}  // namespace restruct

#endif  // RESTRUCT_SIMILARITY_HPP_
