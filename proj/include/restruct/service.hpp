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

// Local HTTP service:
//   GET  /healthz       -> "ok"
//   POST /v1/transform  {"html", "mode", "options"?} -> TransformResult
//   POST /v1/audit      {"html"} -> AuditReport
// Handlers are plain functions of the request body so they can be tested
// without a socket; make_server() wires them into cpp-httplib.

#ifndef RESTRUCT_SERVICE_HPP_
#define RESTRUCT_SERVICE_HPP_

#include <cstdlib>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <type_traits>

#include "httplib.h"
#include "json.hpp"
#include "restruct/audit.hpp"
#include "restruct/html_parser.hpp"
#include "restruct/pipeline.hpp"
#include "restruct/remote.hpp"

namespace restruct {

inline constexpr int kDefaultPort = 8787;
inline constexpr std::size_t kDefaultMaxBody = 8u << 20;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = kDefaultPort;
  RemoteSettings remote;
  TransformOptions defaults;
  std::size_t max_body = kDefaultMaxBody;
  /// Exact origin allowed by CORS in addition to browser-extension origins.
  std::string allowed_origin;
  /// Source of providers for "provider":"mock" requests; mock is refused
  /// when unset.
  std::function<std::unique_ptr<CompletionProvider>()> mock_factory;

  /// Remote settings plus RESTRUCT_PORT and RESTRUCT_ALLOWED_ORIGIN.
  static ServiceConfig from_env() {
    ServiceConfig c;
    c.remote = RemoteSettings::from_env();
    if (const char* p = std::getenv("RESTRUCT_PORT"); p && *p) {
      char* end = nullptr;
      long v = std::strtol(p, &end, 10);
      if (*end != '\0') throw ConfigError(std::string("RESTRUCT_PORT is not a number: ") + p);
      c.port = static_cast<int>(v);
    }
    if (const char* o = std::getenv("RESTRUCT_ALLOWED_ORIGIN"); o && *o) c.allowed_origin = o;
    c.validate();
    return c;
  }

  void validate() const {
    if (port < 1 || port > 65535) throw ConfigError("port must be within [1, 65535]");
    defaults.validate();
  }
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

namespace service {

inline HttpResponse error(int status, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = message;
  return {status, j.dump()};
}

inline bool origin_allowed(std::string_view origin, const ServiceConfig& cfg) {
  if (origin.empty()) return false;
  if (!cfg.allowed_origin.empty() && origin == cfg.allowed_origin) return true;
  return origin.starts_with("chrome-extension://") || origin.starts_with("moz-extension://");
}

// Request body as a JSON object with a string "html"; null on failure with
// `err` set.
inline std::optional<nlohmann::json> read_request(std::string_view body, const ServiceConfig& cfg,
                                                  HttpResponse& err) {
  if (body.size() > cfg.max_body) {
    err = error(413, "request body exceeds " + std::to_string(cfg.max_body) + " bytes");
    return std::nullopt;
  }
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    err = error(400, "request body must be a JSON object");
    return std::nullopt;
  }
  auto html = j.find("html");
  if (html == j.end() || !html->is_string()) {
    err = error(400, "\"html\" must be a string");
    return std::nullopt;
  }
  return j;
}

template <typename T>
bool read_option(const nlohmann::json& options, const char* key, T& out, std::string& problem) {
  auto it = options.find(key);
  if (it == options.end() || it->is_null()) return true;
  if constexpr (std::is_unsigned_v<T>) {
    if (!it->is_number_unsigned()) {
      problem = std::string("option \"") + key + "\" must be a non-negative integer";
      return false;
    }
  }
  try {
    out = it->get<T>();
    return true;
  } catch (const nlohmann::json::exception&) {
    problem = std::string("option \"") + key + "\" has the wrong type";
    return false;
  }
}

}  // namespace service

inline HttpResponse handle_audit(std::string_view body, const ServiceConfig& cfg) {
  HttpResponse err;
  auto req = service::read_request(body, cfg, err);
  if (!req) return err;
  try {
    Document doc = parse(req->at("html").get<std::string>());
    return {200, to_json(run_audit(doc)).dump()};
  } catch (const ParseError& e) {
    return service::error(400, e.what());
  }
}

inline HttpResponse handle_transform(std::string_view body, const ServiceConfig& cfg) {
  HttpResponse err;
  auto req = service::read_request(body, cfg, err);
  if (!req) return err;

  TransformOptions opts = cfg.defaults;
  auto mode = req->find("mode");
  if (mode == req->end() || !mode->is_string())
    return service::error(400, "\"mode\" must be \"regenerate\" or \"reorganize\"");
  auto parsed_mode = parse_mode(mode->get<std::string>());
  if (!parsed_mode) return service::error(400, "unknown mode \"" + mode->get<std::string>() + "\"");
  opts.mode = *parsed_mode;

  if (auto o = req->find("options"); o != req->end() && !o->is_null()) {
    if (!o->is_object()) return service::error(400, "\"options\" must be an object");
    std::string provider = std::string(to_string(opts.provider));
    std::string problem;
    if (!service::read_option(*o, "provider", provider, problem) ||
        !service::read_option(*o, "threshold", opts.threshold, problem) ||
        !service::read_option(*o, "budget", opts.budget, problem) ||
        !service::read_option(*o, "max_attempts", opts.max_attempts, problem))
      return service::error(400, problem);
    auto kind = parse_provider_kind(provider);
    if (!kind) return service::error(400, "unknown provider \"" + provider + "\"");
    opts.provider = *kind;
  }

  try {
    opts.validate();
    Document doc = parse(req->at("html").get<std::string>());
    Backends backends;
    std::unique_ptr<CompletionProvider> completion;
    std::unique_ptr<EmbeddingProvider> embedder;
    if (opts.provider == ProviderKind::remote) {
      completion = std::make_unique<RemoteChatProvider>(cfg.remote);
      embedder = make_embedder(cfg.remote);
    } else if (opts.provider == ProviderKind::mock) {
      if (!cfg.mock_factory) return service::error(400, "mock provider is not enabled");
      completion = cfg.mock_factory();
    }
    backends.completion = completion.get();
    backends.embedding = embedder.get();
    return {200, to_json(transform(doc, opts, backends)).dump()};
  } catch (const GateError& e) {
    nlohmann::ordered_json j;
    j["error"] = e.what();
    j["best_score"] = e.best_score();
    j["attempts"] = e.attempts();
    return {422, j.dump()};
  } catch (const ProviderError& e) {
    return service::error(502, e.what());
  } catch (const EmbeddingError& e) {
    return service::error(502, e.what());
  } catch (const ParseError& e) {
    return service::error(400, e.what());
  } catch (const ConfigError& e) {
    return service::error(400, e.what());
  } catch (const ChunkError& e) {
    return service::error(400, e.what());
  } catch (const Error& e) {
    return service::error(500, e.what());
  }
}

/// Server with routes and CORS handling. Requests are served concurrently;
/// every request parses its own document.
inline std::unique_ptr<httplib::Server> make_server(const ServiceConfig& cfg) {
  auto server = std::make_unique<httplib::Server>();
  server->set_payload_max_length(cfg.max_body);

  auto cors = [cfg](const httplib::Request& req, httplib::Response& res) {
    std::string origin = req.get_header_value("Origin");
    if (!service::origin_allowed(origin, cfg)) return;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Vary", "Origin");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  };
  auto reply = [cors](const httplib::Request& req, httplib::Response& res, HttpResponse r) {
    cors(req, res);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };

  server->Get("/healthz", [reply](const httplib::Request& req, httplib::Response& res) {
    reply(req, res, {200, "ok", "text/plain"});
  });
  server->Post("/v1/transform", [cfg, reply](const httplib::Request& req, httplib::Response& res) {
    reply(req, res, handle_transform(req.body, cfg));
  });
  server->Post("/v1/audit", [cfg, reply](const httplib::Request& req, httplib::Response& res) {
    reply(req, res, handle_audit(req.body, cfg));
  });
  server->Options(".*", [cors](const httplib::Request& req, httplib::Response& res) {
    cors(req, res);
    res.status = 204;
  });
  return server;
}

/// Blocks serving until the server is stopped. Returns false if the socket
/// could not be bound.
inline bool run_service(const ServiceConfig& cfg) {
  cfg.validate();
  auto server = make_server(cfg);
  return server->listen(cfg.host, cfg.port);
}

}  // namespace restruct

#endif  // RESTRUCT_SERVICE_HPP_
