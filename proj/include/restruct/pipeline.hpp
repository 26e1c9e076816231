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

// End-to-end transforms. Regenerate rebuilds the page through the model (or
// the offline regenerator); reorganize asks for tag patches and applies them
// in place. Both are gated on content similarity with the original.

#ifndef RESTRUCT_PIPELINE_HPP_
#define RESTRUCT_PIPELINE_HPP_

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "restruct/audit.hpp"
#include "restruct/chunker.hpp"
#include "restruct/dom.hpp"
#include "restruct/extract.hpp"
#include "restruct/html_parser.hpp"
#include "restruct/llm.hpp"
#include "restruct/offline.hpp"
#include "restruct/patches.hpp"
#include "restruct/similarity.hpp"

namespace restruct {

enum class ProviderKind { remote, mock, offline };

inline std::string_view to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::remote: return "remote";
    case ProviderKind::mock: return "mock";
    case ProviderKind::offline: return "offline";
  }
  return "";
}

inline std::optional<ProviderKind> parse_provider_kind(std::string_view s) {
  if (s == "remote") return ProviderKind::remote;
  if (s == "mock") return ProviderKind::mock;
  if (s == "offline") return ProviderKind::offline;
  return std::nullopt;
}

struct TransformOptions {
  Mode mode = Mode::regenerate;
  ProviderKind provider = ProviderKind::offline;
  double threshold = kDefaultThreshold;
  std::size_t budget = kDefaultChunkBudget;
  std::size_t max_attempts = 3;
  ModelParams params;
  std::size_t input_window = kInputWindowTokens;

  void validate() const {
    if (!(threshold >= 0.0 && threshold <= 1.0))
      throw ConfigError("threshold must be within [0, 1]");
    if (max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
    if (budget < kMinChunkBudget)
      throw ConfigError("budget must be at least " + std::to_string(kMinChunkBudget));
    if (budget >= input_window) throw ConfigError("budget must be below the input window");
  }
};

/// Raised when no attempt reached the similarity threshold.
class GateError : public Error {
 public:
  GateError(double best_score, std::size_t attempts)
      : Error("similarity gate failed after " + std::to_string(attempts) +
              " attempt(s); best score " + std::to_string(best_score)),
        best_score_(best_score),
        attempts_(attempts) {}
  double best_score() const noexcept { return best_score_; }
  std::size_t attempts() const noexcept { return attempts_; }

 private:
  double best_score_;
  std::size_t attempts_;
};

struct TransformResult {
  std::string html;
  std::optional<std::vector<TagPatch>> patches;
  std::vector<std::string> patch_paths;  // node_path of each patch in the input
  SimilarityReport similarity;
  AuditReport audit_before;
  AuditReport audit_after;
  std::size_t attempts = 0;
  std::size_t chunk_count = 0;
  std::vector<std::string> warnings;
  std::vector<RejectedPatch> rejected;
};

/// Collaborators for a run. Null members fall back to defaults: the lexical
/// embedder and the built-in prompt templates. A completion provider is
/// required unless the options select the offline provider.
struct Backends {
  CompletionProvider* completion = nullptr;
  EmbeddingProvider* embedding = nullptr;
  std::optional<PromptTemplate> regenerate_template;
  std::optional<PromptTemplate> reorganize_template;

  static Backends with(CompletionProvider* completion, EmbeddingProvider* embedding = nullptr) {
    Backends b;
    b.completion = completion;
    b.embedding = embedding;
    return b;
  }
};

namespace pipeline {

inline bool is_event_handler(std::string_view attr) {
  return attr.size() > 2 && text::istarts_with(attr, "on");
}

/// Removes script and style elements and event-handler attributes.
inline void sanitize(Document& doc) {
  std::vector<NodeId> drop;
  doc.walk(doc.root(), [&](const DomNode& n) {
    if (n.is_element("script") || n.is_element("style")) {
      drop.push_back(n.id);
      return false;
    }
    return true;
  });
  for (NodeId id : drop) doc.remove(id);
  for (NodeId id : doc.document_order()) {
    auto& attrs = doc.node(id).attributes;
    attrs.erase(std::remove_if(attrs.begin(), attrs.end(),
                               [](const Attribute& a) { return is_event_handler(a.name); }),
                attrs.end());
  }
}

/// Input for the regenerate prompt: sanitized, without noscript, template
/// and comments, none of which a screen reader announces.
inline Document prepare_for_regeneration(Document doc) {
  sanitize(doc);
  std::vector<NodeId> drop;
  doc.walk(doc.root(), [&](const DomNode& n) {
    if (n.kind == NodeKind::comment || n.is_element("noscript") || n.is_element("template")) {
      drop.push_back(n.id);
      return false;
    }
    return true;
  });
  for (NodeId id : drop) doc.remove(id);
  return doc;
}

inline void check_window(const PromptTemplate& t, const TransformOptions& opts,
                         std::size_t chunk_count) {
  ContextWindow w{opts.input_window, opts.budget, estimate_tokens};
  std::size_t overhead = prompt_overhead(t, w, std::max<std::size_t>(chunk_count, 1));
  if (opts.budget + overhead > opts.input_window)
    throw ConfigError("budget " + std::to_string(opts.budget) + " plus prompt overhead " +
                      std::to_string(overhead) + " exceeds the input window of " +
                      std::to_string(opts.input_window) + " tokens");
}

inline void warn_oversize(const std::vector<Chunk>& chunks, std::vector<std::string>& warnings) {
  for (const auto& c : chunks)
    if (c.oversize)
      warnings.push_back("chunk " + std::to_string(c.index) + " exceeds the budget (" +
                         std::to_string(c.token_estimate) + " tokens)");
}

inline CompletionProvider& require(const Backends& b) {
  if (!b.completion) throw ConfigError("no completion provider configured");
  return *b.completion;
}

}  // namespace pipeline

/// Option 1: rebuilds the page, retrying the whole sequence until the
/// similarity gate passes, then restores any links the rebuild lost.
inline TransformResult regenerate(const Document& doc, const TransformOptions& opts,
                                  const Backends& backends = {}) {
  opts.validate();
  LexicalEmbedder lexical;
  EmbeddingProvider& embedder = backends.embedding ? *backends.embedding : lexical;
  const AccessibleContent original = extract_accessible(doc);

  TransformResult result;
  result.audit_before = run_audit(doc);

  auto finish = [&](Document candidate, double score, std::size_t attempt) {
    auto missing = find_missing_links(doc, candidate);
    candidate = reinsert_links(std::move(candidate), missing);
    result.html = serialize(candidate);
    result.audit_after = run_audit(candidate);
    result.similarity =
        make_similarity_report(score, opts.threshold, embedder.name(), std::move(missing));
    result.attempts = attempt;
    return result;
  };

  if (opts.provider == ProviderKind::offline) {
    // Deterministic: a second attempt would reproduce the first.
    Document candidate = parse(offline_regenerate(doc));
    pipeline::sanitize(candidate);
    double score = aggregated_similarity(original, extract_accessible(candidate), embedder);
    result.chunk_count = 1;
    if (!gate(score, opts.threshold)) throw GateError(score, 1);
    return finish(std::move(candidate), score, 1);
  }

  CompletionProvider& provider = pipeline::require(backends);
  const PromptTemplate tmpl =
      backends.regenerate_template.value_or(default_template(Mode::regenerate));
  tmpl.validate();
  Document prepared = pipeline::prepare_for_regeneration(doc);
  ChunkOptions chunk_opts;
  chunk_opts.budget = opts.budget;
  auto chunks = chunk_document(prepared, chunk_opts);
  result.chunk_count = chunks.size();
  pipeline::check_window(tmpl, opts, chunks.size());
  pipeline::warn_oversize(chunks, result.warnings);
  ContextWindow window{opts.input_window, opts.budget, estimate_tokens};

  double best = 0.0;
  for (std::size_t attempt = 1; attempt <= opts.max_attempts; ++attempt) {
    auto seq = run_sequence(chunks, tmpl, provider, opts.params, window);
    for (auto& w : seq.warnings) result.warnings.push_back(std::move(w));
    std::vector<std::string> fragments;
    for (const auto& r : seq.responses) fragments.push_back(extract_html_payload(r));
    Document candidate = parse(stitch(fragments));
    pipeline::sanitize(candidate);
    double score = aggregated_similarity(original, extract_accessible(candidate), embedder);
    best = std::max(best, score);
    if (gate(score, opts.threshold)) return finish(std::move(candidate), score, attempt);
    result.warnings.push_back("attempt " + std::to_string(attempt) + ": similarity " +
                              std::to_string(score) + " below threshold");
  }
  throw GateError(best, opts.max_attempts);
}

/// Option 2: applies tag patches from the model (or the offline fixer) and
/// gates the patched page. Patches never add or remove nodes, so lost links
/// are reported but not reinserted.
inline TransformResult reorganize(const Document& doc, const TransformOptions& opts,
                                  const Backends& backends = {}) {
  opts.validate();
  LexicalEmbedder lexical;
  EmbeddingProvider& embedder = backends.embedding ? *backends.embedding : lexical;
  const AccessibleContent original = extract_accessible(doc);

  TransformResult result;
  result.audit_before = run_audit(doc);

  auto evaluate = [&](std::vector<TagPatch> list, std::size_t attempt) -> std::optional<double> {
    Document patched = apply_patches(doc, list);
    double score = aggregated_similarity(original, extract_accessible(patched), embedder);
    if (!gate(score, opts.threshold)) return score;
    result.html = serialize(patched);
    result.audit_after = run_audit(patched);
    result.similarity = make_similarity_report(score, opts.threshold, embedder.name(),
                                               find_missing_links(doc, patched));
    result.patch_paths.clear();
    for (const auto& p : list) result.patch_paths.push_back(node_path(doc, p.node));
    result.patches = std::move(list);
    result.attempts = attempt;
    return std::nullopt;
  };

  if (opts.provider == ProviderKind::offline) {
    result.chunk_count = 1;
    if (auto failed = evaluate(offline_reorganize(doc), 1)) throw GateError(*failed, 1);
    return result;
  }

  CompletionProvider& provider = pipeline::require(backends);
  const PromptTemplate tmpl =
      backends.reorganize_template.value_or(default_template(Mode::reorganize));
  tmpl.validate();
  auto chunks = chunk_records(tag_records(doc), opts.budget);
  result.chunk_count = chunks.size();
  pipeline::check_window(tmpl, opts, chunks.size());
  pipeline::warn_oversize(chunks, result.warnings);
  ContextWindow window{opts.input_window, opts.budget, estimate_tokens};

  double best = 0.0;
  for (std::size_t attempt = 1; attempt <= opts.max_attempts; ++attempt) {
    auto seq = run_sequence(chunks, tmpl, provider, opts.params, window);
    for (auto& w : seq.warnings) result.warnings.push_back(std::move(w));
    std::vector<TagPatch> list;
    std::vector<RejectedPatch> rejected;
    try {
      for (const auto& r : seq.responses) {
        auto parsed = parse_patches(r, doc);
        list.insert(list.end(), parsed.patches.begin(), parsed.patches.end());
        rejected.insert(rejected.end(), parsed.rejected.begin(), parsed.rejected.end());
      }
    } catch (const PatchFormatError& e) {
      result.warnings.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
      continue;
    }
    for (const auto& r : rejected)
      result.warnings.push_back("attempt " + std::to_string(attempt) + ": patch " +
                                std::to_string(r.index) + " rejected: " + r.reason);
    auto failed = evaluate(std::move(list), attempt);
    if (!failed) {
      result.rejected = std::move(rejected);
      return result;
    }
    best = std::max(best, *failed);
    result.warnings.push_back("attempt " + std::to_string(attempt) + ": similarity " +
                              std::to_string(*failed) + " below threshold");
  }
  throw GateError(best, opts.max_attempts);
}

inline TransformResult transform(const Document& doc, const TransformOptions& opts,
                                 const Backends& backends = {}) {
  return opts.mode == Mode::regenerate ? regenerate(doc, opts, backends)
                                       : reorganize(doc, opts, backends);
}

inline nlohmann::ordered_json to_json(const TransformResult& r) {
  nlohmann::ordered_json j;
  j["html"] = r.html;
  if (r.patches) {
    j["patches"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.patches->size(); ++i) {
      const TagPatch& p = (*r.patches)[i];
      nlohmann::ordered_json e;
      e["node"] = p.node.value;
      e["path"] = i < r.patch_paths.size() ? r.patch_paths[i] : std::string();
      e["new_tag"] = p.new_tag ? nlohmann::ordered_json(*p.new_tag) : nlohmann::ordered_json();
      e["set_attributes"] = nlohmann::ordered_json::array();
      for (const auto& [k, v] : p.set_attributes) e["set_attributes"].push_back({k, v});
      e["remove_attributes"] = p.remove_attributes;
      j["patches"].push_back(std::move(e));
    }
  } else {
    j["patches"] = nullptr;
  }
  j["similarity"] = to_json(r.similarity);
  j["audit_before"] = to_json(r.audit_before);
  j["audit_after"] = to_json(r.audit_after);
  j["attempts"] = r.attempts;
  j["chunks"] = r.chunk_count;
  return j;
}

}  // namespace restruct

#endif  // RESTRUCT_PIPELINE_HPP_
