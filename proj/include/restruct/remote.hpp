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

// Chat-completions and embeddings clients for OpenAI-compatible endpoints.
// Requires linking against the networking target (cpp-httplib, and OpenSSL
// for https base URLs).

#ifndef RESTRUCT_REMOTE_HPP_
#define RESTRUCT_REMOTE_HPP_

#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "restruct/llm.hpp"
#include "restruct/similarity.hpp"

namespace restruct {

struct RemoteSettings {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::string model = "gpt-4o";
  std::optional<std::string> embed_model;
  int connect_timeout_s = 10;
  int read_timeout_s = 600;

  /// RESTRUCT_BASE_URL, RESTRUCT_API_KEY, RESTRUCT_MODEL, RESTRUCT_EMBED_MODEL.
  static RemoteSettings from_env() {
    RemoteSettings s;
    auto get = [](const char* name) -> std::optional<std::string> {
      const char* v = std::getenv(name);
      if (!v || !*v) return std::nullopt;
      return std::string(v);
    };
    if (auto v = get("RESTRUCT_BASE_URL")) s.base_url = *v;
    if (auto v = get("RESTRUCT_API_KEY")) s.api_key = *v;
    if (auto v = get("RESTRUCT_MODEL")) s.model = *v;
    s.embed_model = get("RESTRUCT_EMBED_MODEL");
    return s;
  }
};

namespace remote {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

inline Endpoint split_base_url(std::string_view url) {
  auto scheme = url.find("://");
  if (scheme == std::string_view::npos) throw ConfigError("base URL needs a scheme: " + std::string(url));
  auto slash = url.find('/', scheme + 3);
  Endpoint e;
  e.origin = std::string(url.substr(0, slash));
  if (slash != std::string_view::npos) e.prefix = std::string(url.substr(slash));
  while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  return e;
}

inline httplib::Result post_json(const RemoteSettings& s, std::string_view path,
                                 const std::string& body) {
  Endpoint ep = split_base_url(s.base_url);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(s.connect_timeout_s, 0);
  client.set_read_timeout(s.read_timeout_s, 0);
  httplib::Headers headers;
  if (!s.api_key.empty()) headers.emplace("Authorization", "Bearer " + s.api_key);
  return client.Post(ep.prefix + std::string(path), headers, body, "application/json");
}

}  // namespace remote

class RemoteChatProvider final : public CompletionProvider {
 public:
  explicit RemoteChatProvider(RemoteSettings settings) : settings_(std::move(settings)) {}

  std::string name() const override { return "remote"; }

  Completion complete(const std::vector<ChatMessage>& messages,
                      const ModelParams& params) override {
    ModelParams p = params;
    if (!settings_.model.empty()) p.model = settings_.model;
    auto res = remote::post_json(settings_, "/chat/completions",
                                 chat_request_json(messages, p).dump());
    if (!res)
      throw ProviderError("chat request to " + settings_.base_url +
                          " failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw ProviderError("chat endpoint returned HTTP " + std::to_string(res->status));
    return parse_chat_response(res->body);
  }

 private:
  RemoteSettings settings_;
};

/// Embeddings over POST {base}/embeddings.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  RemoteEmbedder(RemoteSettings settings, std::string model)
      : settings_(std::move(settings)), model_(std::move(model)) {}

  std::string name() const override { return model_; }

  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
    nlohmann::json req{{"model", model_}, {"input", texts}};
    auto res = remote::post_json(settings_, "/embeddings", req.dump());
    if (!res)
      throw EmbeddingError("embedding request failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw EmbeddingError("embedding endpoint returned HTTP " + std::to_string(res->status));
    try {
      auto j = nlohmann::json::parse(res->body);
      std::vector<std::vector<double>> out;
      for (const auto& d : j.at("data")) out.push_back(d.at("embedding").get<std::vector<double>>());
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw EmbeddingError(std::string("malformed embedding response: ") + e.what());
    }
  }

 private:
  RemoteSettings settings_;
  std::string model_;
};

/// The remote embedder when an embedding model is configured, else null.
inline std::unique_ptr<EmbeddingProvider> make_embedder(const RemoteSettings& s) {
  if (!s.embed_model) return nullptr;
  return std::make_unique<RemoteEmbedder>(s, *s.embed_model);
}

}  // namespace restruct

#endif  // RESTRUCT_REMOTE_HPP_
