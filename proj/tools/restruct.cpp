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

// restruct command line.
//
//   restruct audit PAGE [--format json|text] [--fail-on-violations]
//   restruct regenerate|reorganize PAGE [--provider offline|mock|remote]
//       [--out FILE] [--report FILE] [--threshold X] [--budget N]
//       [--attempts N] [--template FILE] [--mock-script FILE]
//   restruct compare A B
//   restruct serve [--port N] [--allowed-origin ORIGIN] [--mock-script FILE]
//
// PAGE may be "-" for stdin. Exit status: 0 success, 1 gate, provider,
// input or violation failure, 2 usage error.

#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "restruct/audit.hpp"
#include "restruct/html_parser.hpp"
#include "restruct/llm.hpp"
#include "restruct/pipeline.hpp"
#include "restruct/remote.hpp"
#include "restruct/service.hpp"
#include "restruct/similarity.hpp"

namespace {

// Unreadable inputs and unusable arguments; reported like other usage errors.
class InputError : public restruct::ConfigError {
 public:
  using restruct::ConfigError::ConfigError;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& path, const std::string& data) {
  if (path == "-") {
    std::cout << data;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(data.data(), static_cast<std::streamsize>(data.size())))
    throw InputError("cannot write " + path);
}

// Mock scripts: a JSON array whose entries are a reply string, {"reply":
// str, "truncated": bool}, {"fail": message} or {"echo": true}; or an object
// {"steps": [...], "cycle": bool}.
std::function<std::unique_ptr<restruct::CompletionProvider>()> load_mock_script(
    const std::string& path) {
  using restruct::MockProvider;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_input(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("bad mock script " + path + ": " + e.what());
  }
  bool cycle = false;
  if (j.is_object()) {
    cycle = j.value("cycle", false);
    j = j.value("steps", nlohmann::json::array());
  }
  if (!j.is_array()) throw InputError("mock script must be a JSON array");
  std::vector<MockProvider::Step> steps;
  for (const auto& e : j) {
    if (e.is_string()) {
      steps.push_back(MockProvider::Reply{e.get<std::string>()});
    } else if (e.is_object() && e.contains("reply")) {
      steps.push_back(MockProvider::Reply{e.at("reply").get<std::string>(),
                                          e.value("truncated", false)});
    } else if (e.is_object() && e.contains("fail")) {
      steps.push_back(MockProvider::Failure{e.at("fail").get<std::string>()});
    } else if (e.is_object() && e.value("echo", false)) {
      steps.push_back(MockProvider::Echo{});
    } else {
      throw InputError("unrecognized mock script entry: " + e.dump());
    }
  }
  return [steps, cycle] { return std::make_unique<MockProvider>(steps, cycle); };
}

void print_audit_text(const restruct::AuditReport& r, std::ostream& os) {
  for (const auto& v : r.violations) os << v.rule_id << "  " << v.path << "  " << v.message << "\n";
  os << r.instance_count << " violation(s), " << r.distinct_rule_count << " rule(s)\n";
}

struct Flags {
  std::string input;
  std::string second;
  std::string format = "text";
  bool fail_on_violations = false;
  std::string provider = "offline";
  double threshold = restruct::kDefaultThreshold;
  std::size_t budget = restruct::kDefaultChunkBudget;
  std::size_t attempts = 3;
  std::string out;
  std::string report;
  std::string template_path;
  std::string mock_script;
  int port = 0;
  std::string allowed_origin;
};

int run_audit_cmd(const Flags& f) {
  auto report = restruct::run_audit(restruct::parse(read_input(f.input)));
  if (f.format == "json")
    std::cout << restruct::to_json(report).dump() << "\n";
  else
    print_audit_text(report, std::cout);
  return f.fail_on_violations && report.instance_count > 0 ? 1 : 0;
}

int run_transform_cmd(restruct::Mode mode, const Flags& f) {
  restruct::TransformOptions opts;
  opts.mode = mode;
  opts.provider = *restruct::parse_provider_kind(f.provider);
  opts.threshold = f.threshold;
  opts.budget = f.budget;
  opts.max_attempts = f.attempts;
  opts.validate();

  restruct::Document doc = restruct::parse(read_input(f.input));
  restruct::Backends backends;
  std::unique_ptr<restruct::CompletionProvider> completion;
  std::unique_ptr<restruct::EmbeddingProvider> embedder;
  if (opts.provider == restruct::ProviderKind::remote) {
    auto settings = restruct::RemoteSettings::from_env();
    completion = std::make_unique<restruct::RemoteChatProvider>(settings);
    embedder = restruct::make_embedder(settings);
  } else if (opts.provider == restruct::ProviderKind::mock) {
    if (f.mock_script.empty()) throw InputError("--provider mock needs --mock-script");
    completion = load_mock_script(f.mock_script)();
  }
  backends.completion = completion.get();
  backends.embedding = embedder.get();
  if (!f.template_path.empty()) {
    auto t = restruct::load_template(f.template_path);
    if (t.mode != mode) throw InputError("template mode does not match the command");
    (mode == restruct::Mode::regenerate ? backends.regenerate_template
                                        : backends.reorganize_template) = t;
  }

  auto result = restruct::transform(doc, opts, backends);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::string json = restruct::to_json(result).dump();
  if (!f.report.empty()) write_output(f.report, json + "\n");
  if (!f.out.empty()) write_output(f.out, result.html);

  if (f.format == "json") {
    std::cout << json << "\n";
  } else if (f.out.empty()) {
    std::cout << result.html;
  } else {
    std::cout << "similarity " << result.similarity.score << " (threshold "
              << result.similarity.threshold << "), attempts " << result.attempts
              << ", chunks " << result.chunk_count << ", violations "
              << result.audit_before.instance_count << " -> " << result.audit_after.instance_count
              << "\n";
  }
  return f.fail_on_violations && result.audit_after.instance_count > 0 ? 1 : 0;
}

int run_compare_cmd(const Flags& f) {
  if (f.input == "-" && f.second == "-") throw InputError("only one input may be stdin");
  auto a = restruct::parse(read_input(f.input));
  auto b = restruct::parse(read_input(f.second));
  restruct::LexicalEmbedder lexical;
  double score = restruct::aggregated_similarity(restruct::extract_accessible(a),
                                                 restruct::extract_accessible(b), lexical);
  auto sim = restruct::make_similarity_report(score, f.threshold, lexical.name(),
                                              restruct::find_missing_links(a, b));
  auto diff = restruct::diff_reports(restruct::run_audit(a), restruct::run_audit(b));
  if (f.format == "json") {
    nlohmann::ordered_json j;
    j["similarity"] = restruct::to_json(sim);
    j["audit_diff"] = restruct::to_json(diff);
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "similarity " << sim.score << " (" << (sim.pass ? "pass" : "fail") << ")\n";
    for (const auto& m : sim.missing_anchors)
      std::cout << "missing link " << m.href << "  " << m.text << "\n";
    for (const auto& d : diff.per_rule)
      if (d.before || d.after)
        std::cout << d.rule_id << "  " << d.before << " -> " << d.after << "\n";
    std::cout << "total " << diff.total_before << " -> " << diff.total_after << "\n";
  }
  return 0;
}

int run_serve_cmd(const Flags& f) {
  auto cfg = restruct::ServiceConfig::from_env();
  if (f.port) cfg.port = f.port;
  if (!f.allowed_origin.empty()) cfg.allowed_origin = f.allowed_origin;
  if (!f.mock_script.empty()) cfg.mock_factory = load_mock_script(f.mock_script);
  cfg.validate();
  std::cerr << "listening on http://" << cfg.host << ":" << cfg.port << "\n";
  if (!restruct::run_service(cfg)) throw InputError("cannot listen on port " + std::to_string(cfg.port));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restructures HTML pages for screen reader navigation."};
  app.require_subcommand(1);
  Flags f;
  const std::vector<std::string> formats{"json", "text"};

  auto* audit = app.add_subcommand("audit", "Report accessibility violations");
  audit->add_option("page", f.input, "HTML file or - for stdin")->required();
  audit->add_option("--format", f.format)->check(CLI::IsMember(formats));
  audit->add_flag("--fail-on-violations", f.fail_on_violations, "Exit 1 when any violation is found");

  std::vector<CLI::App*> transforms;
  for (const char* name : {"regenerate", "reorganize"}) {
    auto* cmd = app.add_subcommand(name, std::string(name) == "regenerate"
                                             ? "Rebuild the page as text-only accessible HTML"
                                             : "Fix tags and attributes in place");
    cmd->add_option("page", f.input, "HTML file or - for stdin")->required();
    cmd->add_option("--provider", f.provider)
        ->check(CLI::IsMember({"offline", "mock", "remote"}));
    cmd->add_option("--threshold", f.threshold, "Similarity gate")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--budget", f.budget, "Chunk budget in tokens")
        ->check(CLI::Range(restruct::kMinChunkBudget, restruct::kInputWindowTokens - 1));
    cmd->add_option("--attempts", f.attempts, "Maximum gate attempts")->check(CLI::PositiveNumber);
    cmd->add_option("--out", f.out, "Write transformed HTML here");
    cmd->add_option("--report", f.report, "Write the result JSON here");
    cmd->add_option("--format", f.format)->check(CLI::IsMember(formats));
    cmd->add_option("--template", f.template_path, "Prompt template JSON");
    cmd->add_option("--mock-script", f.mock_script, "Scripted replies for --provider mock");
    cmd->add_flag("--fail-on-violations", f.fail_on_violations,
                  "Exit 1 when the output still has violations");
    transforms.push_back(cmd);
  }

  auto* compare = app.add_subcommand("compare", "Similarity and audit delta of two pages");
  compare->add_option("a", f.input)->required();
  compare->add_option("b", f.second)->required();
  compare->add_option("--format", f.format)->check(CLI::IsMember(formats));
  compare->add_option("--threshold", f.threshold)->check(CLI::Range(0.0, 1.0));

  auto* serve = app.add_subcommand("serve", "Run the local HTTP service");
  serve->add_option("--port", f.port)->check(CLI::Range(1, 65535));
  serve->add_option("--allowed-origin", f.allowed_origin, "Extra CORS origin");
  serve->add_option("--mock-script", f.mock_script, "Enable provider mock with this script");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (audit->parsed()) return run_audit_cmd(f);
    if (transforms[0]->parsed()) return run_transform_cmd(restruct::Mode::regenerate, f);
    if (transforms[1]->parsed()) return run_transform_cmd(restruct::Mode::reorganize, f);
    if (compare->parsed()) return run_compare_cmd(f);
    if (serve->parsed()) return run_serve_cmd(f);
  } catch (const restruct::GateError& e) {
    std::cerr << "restruct: " << e.what() << "\n";
    return 1;
  } catch (const restruct::ConfigError& e) {
    std::cerr << "restruct: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "restruct: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
