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

// Provider-agnostic chat completion access: prompt templates, message
// assembly with prior-output context, the strictly sequential chunk runner,
// and a scripted provider for tests.

#ifndef RESTRUCT_LLM_HPP_
#define RESTRUCT_LLM_HPP_

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "restruct/chunker.hpp"
#include "restruct/text.hpp"

namespace restruct {

/// Input window of the target model, in tokens.
inline constexpr std::size_t kInputWindowTokens = 128000;

struct ModelParams {
  std::string model = "gpt-4o";
  double temperature = 0.2;
  std::size_t max_tokens = 16384;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
};

enum class Role { system, user, assistant };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

struct ChatMessage {
  Role role;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

enum class Mode { regenerate, reorganize };

inline std::string_view to_string(Mode m) {
  return m == Mode::regenerate ? "regenerate" : "reorganize";
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "regenerate") return Mode::regenerate;
  if (s == "reorganize") return Mode::reorganize;
  return std::nullopt;
}

class TemplateError : public Error {
 public:
  using Error::Error;
};

struct PromptTemplate {
  Mode mode = Mode::regenerate;
  std::string system;
  std::string first_user;
  std::string continuation_user;  // {part_index} and {content}
  std::string assistant_context;  // {previous_output}

  /// Throws TemplateError unless every placeholder occurs exactly once.
  void validate() const {
    auto once = [](const std::string& host, std::string_view ph, std::string_view field) {
      if (text::count_occurrences(host, ph) != 1)
        throw TemplateError(std::string(field) + " must contain " + std::string(ph) +
                            " exactly once");
    };
    once(continuation_user, "{part_index}", "continuation_user");
    once(continuation_user, "{content}", "continuation_user");
    once(assistant_context, "{previous_output}", "assistant_context");
  }
};

namespace prompts {

inline constexpr std::string_view kRegenerateSystem =
    "Your task is to enhance the accessibility of the shopping website for blind screen reader "
    "users. Screen reader users navigate websites sequentially and use shortcuts to jump across "
    "headings and links. Remove non-essential elements (e.g., pictures, <style>, <script>) and "
    "ensure all content from the original HTML is included and properly structured.";

inline constexpr std::string_view kRegenerateUser =
    "Generate executable, text-only HTML optimized for screen reader users. Reorganize headings "
    "to reflect information hierarchy and enhance clarity. Prioritize content that is most "
    "relevant for screen reader navigation.";

inline constexpr std::string_view kRegenerateContinuation =
    "This is part {part_index} of the HTML document. Please continue processing it while "
    "maintaining the previous structure.\n\n{content}";

inline constexpr std::string_view kReorganizeSystem =
    "You are an accessibility expert. Screen reader users navigate content sequentially, relying "
    "on well-structured headings, landmarks, and clear labels. Your task is to revise the tags of "
    "an existing webpage to improve accessibility without modifying its visual layout or "
    "content.";

inline constexpr std::string_view kReorganizeUser =
    "Please adjust tags to enhance accessibility for screen reader users. Do not introduce or "
    "remove elements. Only reorganize or relabel existing tags based on structural clarity and "
    "semantic accuracy.\n\n"
    "The input is a JSON array of element records "
    "{\"node\",\"tag\",\"id\",\"classes\",\"attributes\",\"text\"}. Reply with a JSON array of "
    "patches {\"node\": <node>, \"new_tag\": <tag, optional>, \"set_attributes\": "
    "[[name, value], ...] (optional), \"remove_attributes\": [name, ...] (optional)}. Reply [] "
    "when nothing needs to change.";

inline constexpr std::string_view kReorganizeContinuation =
    "Part {part_index}. This is the remaining JSON content that needs to be processed. Ensure "
    "completeness and do not duplicate any previously generated elements.\n\n{content}";

inline constexpr std::string_view kAssistantContext =
    "This is the previous response from the system: {previous_output}";

}  // namespace prompts

inline PromptTemplate default_template(Mode mode) {
  if (mode == Mode::regenerate)
    return {mode, std::string(prompts::kRegenerateSystem), std::string(prompts::kRegenerateUser),
            std::string(prompts::kRegenerateContinuation),
            std::string(prompts::kAssistantContext)};
  return {mode, std::string(prompts::kReorganizeSystem), std::string(prompts::kReorganizeUser),
          std::string(prompts::kReorganizeContinuation), std::string(prompts::kAssistantContext)};
}

inline PromptTemplate template_from_json(const nlohmann::json& j) {
  auto mode = parse_mode(j.at("mode").get<std::string>());
  if (!mode) throw TemplateError("unknown template mode");
  PromptTemplate t{*mode, j.at("system").get<std::string>(), j.at("first_user").get<std::string>(),
                   j.at("continuation_user").get<std::string>(),
                   j.at("assistant_context").get<std::string>()};
  t.validate();
  return t;
}

inline nlohmann::ordered_json to_json(const PromptTemplate& t) {
  return {{"mode", std::string(to_string(t.mode))},
          {"system", t.system},
          {"first_user", t.first_user},
          {"continuation_user", t.continuation_user},
          {"assistant_context", t.assistant_context}};
}

inline PromptTemplate load_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TemplateError("cannot open template " + path);
  try {
    return template_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw TemplateError("bad template " + path + ": " + e.what());
  }
}

/// Token accounting for one call.
struct ContextWindow {
  std::size_t input_tokens = kInputWindowTokens;
  std::size_t budget = kDefaultChunkBudget;
  TokenCounter counter = estimate_tokens;
};

/// Tokens consumed by everything except the chunk content and the previous
/// output, for the worst case (a continuation call with index `part_index`).
inline std::size_t prompt_overhead(const PromptTemplate& t, const ContextWindow& w,
                                   std::size_t part_index) {
  std::string cont = t.continuation_user;
  text::replace_all(cont, "{content}", "");
  text::replace_all(cont, "{part_index}", "");
  std::string ctx = t.assistant_context;
  text::replace_all(ctx, "{previous_output}", "");
  std::size_t first = w.counter(t.system) + w.counter(t.first_user + "\n\n");
  std::size_t later = w.counter(t.system) + w.counter(cont) + w.counter(std::to_string(part_index)) +
                      w.counter(ctx);
  return std::max(first, later);
}

/// Tokens left for previous output on a continuation call.
inline std::size_t previous_output_allowance(const PromptTemplate& t, const ContextWindow& w,
                                             std::size_t part_index) {
  std::size_t used = prompt_overhead(t, w, part_index) + w.budget;
  return used >= w.input_tokens ? 0 : w.input_tokens - used;
}

/// Keeps the tail of `previous` that fits `allowance` tokens.
inline std::string truncate_front(std::string_view previous, std::size_t allowance,
                                  const TokenCounter& counter) {
  if (counter(previous) <= allowance) return std::string(previous);
  std::size_t lo = 0, hi = previous.size();
  while (lo < hi) {  // largest byte count whose tail fits
    std::size_t mid = (lo + hi + 1) / 2;
    if (counter(text::utf8_tail(previous, mid)) <= allowance)
      lo = mid;
    else
      hi = mid - 1;
  }
  return std::string(text::utf8_tail(previous, lo));
}

class GatewayError : public Error {
 public:
  using Error::Error;
};

/// Messages for one chunk: [system, user] for the first, [system,
/// assistant(previous output), user(continuation)] for the rest.
inline std::vector<ChatMessage> build_messages(const PromptTemplate& t, const Chunk& chunk,
                                               const std::optional<std::string>& previous_output,
                                               const ContextWindow& window = {}) {
  if (chunk.index <= 1)
    return {{Role::system, t.system}, {Role::user, t.first_user + "\n\n" + chunk.html}};
  if (!previous_output)
    throw GatewayError("chunk " + std::to_string(chunk.index) + " needs the previous output");
  std::string prev = truncate_front(*previous_output,
                                    previous_output_allowance(t, window, chunk.index),
                                    window.counter);
  std::string assistant = t.assistant_context;
  assistant.replace(assistant.find("{previous_output}"), 17, prev);
  std::string user = t.continuation_user;
  // Substitute content last so text inside it is never treated as a placeholder.
  user.replace(user.find("{part_index}"), 12, std::to_string(chunk.index));
  user.replace(user.find("{content}"), 9, chunk.html);
  return {{Role::system, t.system}, {Role::assistant, std::move(assistant)},
          {Role::user, std::move(user)}};
}

struct Completion {
  std::string text;
  bool truncated = false;  // the provider stopped at max_tokens
};

class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& what, std::size_t chunk_index = 0)
      : Error(what), chunk_index_(chunk_index) {}
  std::size_t chunk_index() const noexcept { return chunk_index_; }

 private:
  std::size_t chunk_index_;
};

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string name() const = 0;
  virtual Completion complete(const std::vector<ChatMessage>& messages,
                              const ModelParams& params) = 0;
};

/// Replays a script of replies in order. Every call is logged.
class MockProvider final : public CompletionProvider {
 public:
  struct Reply {
    std::string text;
    bool truncated = false;
  };
  struct Failure {
    std::string message;
  };
  /// Replies with the HTML payload of the last user message.
  struct Echo {};
  using Step = std::variant<Reply, Failure, Echo>;

  MockProvider() = default;
  explicit MockProvider(std::vector<Step> script, bool cycle = false)
      : script_(std::move(script)), cycle_(cycle) {}

  static MockProvider replies(const std::vector<std::string>& texts, bool cycle = false) {
    std::vector<Step> steps;
    for (const auto& t : texts) steps.push_back(Reply{t});
    return MockProvider(std::move(steps), cycle);
  }

  std::string name() const override { return "mock"; }

  Completion complete(const std::vector<ChatMessage>& messages,
                      const ModelParams& params) override;

  const std::vector<std::vector<ChatMessage>>& calls() const noexcept { return calls_; }
  const std::vector<ModelParams>& params_log() const noexcept { return params_; }

 private:
  std::vector<Step> script_;
  bool cycle_ = false;
  std::size_t next_ = 0;
  std::vector<std::vector<ChatMessage>> calls_;
  std::vector<ModelParams> params_;
};

/// Content of the first fenced code block; else the span from the first '<'
/// to the last '>'; else the trimmed response.
inline std::string extract_html_payload(std::string_view response) {
  if (auto fence = response.find("```"); fence != std::string_view::npos) {
    auto line_end = response.find('\n', fence + 3);
    if (line_end != std::string_view::npos) {
      auto close = response.find("```", line_end + 1);
      auto body = response.substr(line_end + 1, close == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : close - line_end - 1);
      return std::string(text::trim(body));
    }
  }
  auto lt = response.find('<');
  auto gt = response.rfind('>');
  if (lt != std::string_view::npos && gt != std::string_view::npos && gt > lt)
    return std::string(response.substr(lt, gt - lt + 1));
  return std::string(text::trim(response));
}

inline Completion MockProvider::complete(const std::vector<ChatMessage>& messages,
                                         const ModelParams& params) {
  calls_.push_back(messages);
  params_.push_back(params);
  if (script_.empty() || (next_ >= script_.size() && !cycle_))
    throw ProviderError("mock script exhausted after " + std::to_string(next_) + " calls");
  const Step& step = script_[next_ % script_.size()];
  ++next_;
  if (const auto* r = std::get_if<Reply>(&step)) return {r->text, r->truncated};
  if (const auto* f = std::get_if<Failure>(&step)) throw ProviderError(f->message);
  std::string last_user;
  for (const auto& m : messages)
    if (m.role == Role::user) last_user = m.content;
  return {extract_html_payload(last_user), false};
}

struct SequenceResult {
  std::vector<std::string> responses;
  std::vector<std::string> warnings;
};

/// Calls the provider once per chunk in index order, feeding each response
/// to the next call. Stops at the first failure with a ProviderError naming
/// the chunk index.
inline SequenceResult run_sequence(const std::vector<Chunk>& chunks, const PromptTemplate& t,
                                   CompletionProvider& provider, const ModelParams& params,
                                   const ContextWindow& window = {}) {
  SequenceResult out;
  std::optional<std::string> previous;
  for (const auto& chunk : chunks) {
    auto messages = build_messages(t, chunk, previous, window);
    Completion c;
    try {
      c = provider.complete(messages, params);
    } catch (const ProviderError& e) {
      throw ProviderError("provider failed on chunk " + std::to_string(chunk.index) + ": " +
                              e.what(),
                          chunk.index);
    }
    if (c.truncated || window.counter(c.text) > params.max_tokens)
      out.warnings.push_back("chunk " + std::to_string(chunk.index) +
                             ": response may be truncated at max_tokens");
    previous = c.text;
    out.responses.push_back(std::move(c.text));
  }
  return out;
}

inline nlohmann::ordered_json chat_request_json(const std::vector<ChatMessage>& messages,
                                                const ModelParams& p) {
  nlohmann::ordered_json j;
  j["model"] = p.model;
  j["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : messages)
    j["messages"].push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  j["temperature"] = p.temperature;
  j["max_tokens"] = p.max_tokens;
  j["top_p"] = p.top_p;
  j["frequency_penalty"] = p.frequency_penalty;
  j["presence_penalty"] = p.presence_penalty;
  return j;
}

/// Reads choices[0].message.content (and finish_reason) from a response body.
inline Completion parse_chat_response(std::string_view body) {
  try {
    auto j = nlohmann::json::parse(body);
    const auto& choice = j.at("choices").at(0);
    Completion c{choice.at("message").at("content").get<std::string>(), false};
    if (auto fr = choice.find("finish_reason"); fr != choice.end() && fr->is_string())
      c.truncated = fr->get<std::string>() == "length";
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed chat completion response: ") + e.what());
  }
}

}  // namespace restruct

#endif  // RESTRUCT_LLM_HPP_
