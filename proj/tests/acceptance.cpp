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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Tolerances are fixed below.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "json.hpp"
#include "restruct/audit.hpp"
#include "restruct/chunker.hpp"
#include "restruct/html_parser.hpp"
#include "restruct/llm.hpp"
#include "restruct/offline.hpp"
#include "restruct/patches.hpp"
#include "restruct/pipeline.hpp"
#include "restruct/similarity.hpp"

namespace {

using namespace restruct;
namespace fs = std::filesystem;

constexpr double kAuditSecondsPerPage = 1.0;
constexpr double kExactTolerance = 1e-12;  // identity and permutation scores
constexpr int kShuffleCases = 1000;
constexpr int kPairCases = 1000;
constexpr int kChunkCases = 200;
constexpr int kPatchCases = 1000;
constexpr std::size_t kMiniShopMinViolations = 6;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail << why;
    pass = false;
  }
};

std::vector<std::string> corpus() { return testing::corpus(); }
Document page(const std::string& name) { return parse(testing::fixture(name)); }

std::vector<std::string> text_multiset(const Document& d) {
  std::vector<std::string> out;
  d.walk(d.root(), [&](const DomNode& n) {
    if (n.is_text()) out.push_back(n.text);
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

Outcome audit_oracle() {
  Outcome o;
  auto oracle = nlohmann::json::parse(testing::fixture("oracle.json"))["pages"];
  if (oracle.size() < 10) o.fail("oracle covers fewer than 10 pages");
  double slowest = 0;
  for (const auto& [name, counts] : oracle.items()) {
    auto start = std::chrono::steady_clock::now();
    auto report = run_audit(page(name));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    slowest = std::max(slowest, secs);
    if (secs >= kAuditSecondsPerPage) o.fail(name + " took " + std::to_string(secs) + " s");
    std::map<std::string, std::size_t> got, want;
    for (const auto& v : report.violations) ++got[v.rule_id];
    for (const auto& [rule, n] : counts.items()) want[rule] = n.get<std::size_t>();
    if (got != want) o.fail(name + " counts differ from the oracle");
  }
  if (o.pass)
    o.detail << oracle.size() << " pages match; slowest " << slowest * 1000 << " ms";
  return o;
}

Outcome improvement() {
  Outcome o;
  for (const auto& name : corpus()) {
    Document d = page(name);
    for (Mode m : {Mode::regenerate, Mode::reorganize}) {
      TransformOptions opts;
      opts.mode = m;
      try {
        auto r = transform(d, opts);
        if (r.audit_after.instance_count > r.audit_before.instance_count)
          o.fail(name + " " + std::string(to_string(m)) + " increased violations");
        if (name == "mini-shop.html") {
          if (r.audit_before.instance_count < kMiniShopMinViolations)
            o.fail("mini-shop has fewer than 6 violations");
          if (r.audit_after.instance_count >= r.audit_before.instance_count)
            o.fail("mini-shop " + std::string(to_string(m)) + " did not decrease");
          if (o.pass)
            o.detail << "mini-shop " << to_string(m) << " " << r.audit_before.instance_count
                     << "->" << r.audit_after.instance_count << "; ";
        }
      } catch (const Error& e) {
        o.fail(name + " " + std::string(to_string(m)) + ": " + e.what());
      }
    }
  }
  if (o.pass) o.detail << corpus().size() << " fixtures, none worse";
  return o;
}

Outcome similarity_properties() {
  Outcome o;
  LexicalEmbedder lex;
  auto score = [&](const std::string& a, const std::string& b) {
    return aggregated_similarity(extract_accessible(parse(a)), extract_accessible(parse(b)), lex);
  };
  for (const auto& name : corpus()) {
    std::string html = testing::fixture(name);
    if (score(html, html) != 1.0) o.fail("identity below 1.0 on " + name);
  }
  if (score("<p>red blender</p>", "<p>kitchen towel</p>") != 0.0) o.fail("disjoint not 0.0");

  std::mt19937 rng(2026);
  std::vector<std::string> vocab;
  for (int i = 0; i < 60; ++i) vocab.push_back("w" + std::to_string(i));
  auto random_words = [&](std::size_t n) {
    std::vector<std::string> w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(vocab[rng() % vocab.size()]);
    return w;
  };
  auto as_page = [](const std::vector<std::string>& words) {
    std::string s;
    for (std::size_t i = 0; i < words.size(); ++i)
      s += (i % 7 == 0 ? "<p>" : " ") + words[i];
    return s;
  };
  double worst_perm = 1.0;
  for (int i = 0; i < kShuffleCases; ++i) {
    auto words = random_words(1 + rng() % 80);
    auto shuffled = words;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    double s = score(as_page(words), as_page(shuffled));
    worst_perm = std::min(worst_perm, s);
    if (std::abs(s - 1.0) > kExactTolerance) o.fail("permutation changed the score");
  }
  for (int i = 0; i < kPairCases; ++i) {
    auto a = as_page(random_words(rng() % 40)), b = as_page(random_words(rng() % 40));
    double ab = score(a, b), ba = score(b, a);
    if (ab != ba) o.fail("asymmetric pair");
    if (ab < 0.0 || ab > 1.0) o.fail("score outside [0,1]");
  }
  if (o.pass)
    o.detail << "identity 1.0 on corpus, disjoint 0.0, " << kShuffleCases << " shuffles (min "
             << worst_perm << "), " << kPairCases << " symmetric pairs";
  return o;
}

Outcome gate_boundary() {
  Outcome o;
  if (!gate(0.90, kDefaultThreshold)) o.fail("0.90 rejected");
  if (gate(0.8999, kDefaultThreshold)) o.fail("0.8999 accepted");
  MockProvider mock = MockProvider::replies({"<p>unrelated weather report</p>"}, true);
  TransformOptions opts;
  opts.provider = ProviderKind::mock;
  try {
    regenerate(page("mini-shop.html"), opts, Backends::with(&mock));
    o.fail("unrelated replies passed the gate");
  } catch (const GateError& e) {
    if (e.attempts() != opts.max_attempts) o.fail("wrong attempt count in error");
  }
  if (mock.calls().size() != opts.max_attempts)
    o.fail(std::to_string(mock.calls().size()) + " provider calls");
  if (o.pass) o.detail << "0.90 pass, 0.8999 fail, " << mock.calls().size() << " calls then error";
  return o;
}

Outcome reinsertion() {
  Outcome o;
  std::size_t cases = 0, gated = 0;
  for (const auto& name : corpus()) {
    Document original = page(name);
    // Distinct hrefs of rendered links that carry a name.
    std::vector<std::pair<std::string, std::string>> links;
    for (const auto& m : find_missing_links(original, parse("")))
      if (!m.text.empty()) links.emplace_back(m.href, m.text);
    for (std::size_t k = 1; k <= 3 && k <= links.size(); ++k) {
      Document dropped = original;
      for (NodeId a : dropped.elements_by_tag("a"))
        for (std::size_t i = 0; i < k; ++i)
          if (dropped.contains(a) &&
              normalize_href(dropped[a].attr_or("href")) == normalize_href(links[i].first))
            dropped.remove(a);
      MockProvider mock = MockProvider::replies({serialize(dropped)}, true);
      TransformOptions opts;
      opts.provider = ProviderKind::mock;
      TransformResult r;
      try {
        r = regenerate(original, opts, Backends::with(&mock));
      } catch (const GateError&) {
        // Losing most of a tiny page's text fails the gate before any
        // reinsertion happens; check reinsertion itself with the gate off.
        ++gated;
        opts.threshold = 0.0;
        r = regenerate(original, opts, Backends::with(&mock));
      }
      Document out = parse(r.html);
      if (!find_missing_links(original, out).empty()) o.fail(name + ": links still missing");
      for (std::size_t i = 0; i < k; ++i) {
        bool found = false;
        for (NodeId a : out.elements_by_tag("a"))
          found |= out[a].attr_or("href") == links[i].first &&
                   accessible_name(out, a).value_or("") == links[i].second;
        if (!found) o.fail(name + ": " + links[i].first + " not restored exactly");
      }
      ++cases;
    }
  }
  if (cases == 0) o.fail("no fixture has named links");
  if (o.pass)
    o.detail << cases << " drop cases restored (" << gated
             << " rejected by the 0.90 gate, checked with the gate off)";
  return o;
}

Outcome chunker_property() {
  Outcome o;
  std::mt19937 rng(77);
  const char* tags[] = {"div", "section", "p", "span", "ul", "li", "article", "nav"};
  for (int round = 0; round < kChunkCases; ++round) {
    std::function<std::string(int)> gen = [&](int depth) {
      std::string out;
      for (int i = 0, n = 1 + static_cast<int>(rng() % 5); i < n; ++i) {
        if (depth == 0 || rng() % 3 == 0) {
          std::string t;
          for (int w = 0, m = 1 + static_cast<int>(rng() % 60); w < m; ++w)
            t += "t" + std::to_string(rng() % 500) + " ";
          out += rng() % 4 == 0 ? "<img src=x alt=\"" + t + "\">" : "<p>" + t + "</p>";
        } else {
          std::string tg = tags[rng() % 8];
          out += "<" + tg + ">" + gen(depth - 1) + "</" + tg + ">";
        }
      }
      return out;
    };
    Document d = parse(gen(1 + static_cast<int>(rng() % 4)));
    std::size_t budget = kMinChunkBudget + rng() % 400;
    auto chunks = chunk_document(d, budget);

    std::vector<NodeId> expected;
    d.walk(*d.body(), [&](const DomNode& n) {
      if (n.is_text() && !text::is_blank(n.text)) expected.push_back(n.id);
      return true;
    });
    std::vector<NodeId> seen;
    std::set<NodeId> split_seen;
    std::vector<std::string> fragments;
    for (const auto& c : chunks) {
      if (!c.oversize && c.token_estimate > budget) o.fail("chunk over budget");
      for (NodeId id : covered_text_ids(d, c))
        if (!c.split_text || split_seen.insert(id).second) seen.push_back(id);
      fragments.push_back(c.html);
    }
    if (seen != expected) o.fail("coverage or disjointness broken in round " + std::to_string(round));
    if (extract_accessible(parse(stitch(fragments))).concatenated !=
        extract_accessible(d).concatenated)
      o.fail("stitch changed accessible content in round " + std::to_string(round));
  }
  if (o.pass) o.detail << kChunkCases << " random documents";
  return o;
}

Outcome option2_integrity() {
  Outcome o;
  auto names = corpus();
  std::mt19937 rng(5);
  const char* tags[] = {"h1", "h2", "h3", "h4", "p", "span", "div", "section", "nav", "em"};
  const char* attrs[] = {"aria-label", "role", "title", "class", "lang"};
  for (int i = 0; i < kPatchCases; ++i) {
    Document d = page(names[rng() % names.size()]);
    auto records = tag_records(d);
    if (records.empty()) continue;
    nlohmann::json arr = nlohmann::json::array();
    for (int k = 0, n = static_cast<int>(rng() % 10); k < n; ++k) {
      nlohmann::json e{{"node", records[rng() % records.size()].node.value}};
      if (rng() % 2) e["new_tag"] = tags[rng() % 10];
      if (rng() % 2) e["set_attributes"] = {{attrs[rng() % 5], "v" + std::to_string(k)}};
      if (rng() % 3 == 0) e["remove_attributes"] = {attrs[rng() % 5]};
      arr.push_back(e);
    }
    auto parsed = parse_patches(arr.dump(), d);
    if (text_multiset(apply_patches(d, parsed.patches)) != text_multiset(d))
      o.fail("text multiset changed: " + arr.dump());
  }
  for (const auto& name : names) {
    Document d = page(name);
    Document fixed = apply_patches(d, offline_reorganize(d));
    if (!offline_reorganize(fixed).empty()) o.fail(name + ": fixer not idempotent");
    if (run_audit(fixed).count("H-ORDER") != 0) o.fail(name + ": heading skips remain");
  }
  if (o.pass)
    o.detail << kPatchCases << " random patch sets; fixer idempotent with 0 H-ORDER on "
             << names.size() << " pages";
  return o;
}

Outcome config_fidelity() {
  Outcome o;
  ModelParams p;
  if (p.temperature != 0.2 || p.max_tokens != 16384 || p.top_p != 1.0 ||
      p.frequency_penalty != 0.0 || p.presence_penalty != 0.0)
    o.fail("model parameters differ");
  if (kDefaultThreshold != 0.90 || TransformOptions{}.threshold != 0.90) o.fail("threshold");
  std::size_t worst = 0;
  for (Mode m : {Mode::regenerate, Mode::reorganize}) {
    ContextWindow w;
    for (std::size_t part : {1u, 2u, 99u, 100000u}) {
      std::size_t total = kDefaultChunkBudget + prompt_overhead(default_template(m), w, part);
      worst = std::max(worst, total);
      if (total > kInputWindowTokens) o.fail("budget plus overhead exceeds the window");
    }
  }
  if (o.pass) o.detail << "params match; worst budget+overhead " << worst << " <= 128000";
  return o;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string("'") + RESTRUCT_CLI_PATH + "' " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome cli_determinism() {
  Outcome o;
  fs::path dir = fs::temp_directory_path() / "restruct-acceptance";
  fs::create_directories(dir);
  std::size_t runs = 0;
  for (const auto& name : corpus()) {
    for (const char* mode : {"regenerate", "reorganize"}) {
      std::string in = "'" + testing::fixture_path(name).string() + "'";
      std::string a = (dir / "a.html").string(), b = (dir / "b.html").string();
      std::string ra = (dir / "a.json").string(), rb = (dir / "b.json").string();
      if (run_cli(std::string(mode) + " " + in + " --provider offline --out " + a + " --report " +
                  ra) != 0 ||
          run_cli(std::string(mode) + " " + in + " --provider offline --out " + b + " --report " +
                  rb) != 0) {
        o.fail(name + " " + mode + ": CLI failed");
        continue;
      }
      if (testing::read_file(a) != testing::read_file(b) ||
          testing::read_file(ra) != testing::read_file(rb))
        o.fail(name + " " + mode + ": outputs differ");
      runs += 2;
    }
  }
  fs::remove_all(dir);
  if (o.pass) o.detail << runs << " offline CLI runs, pairs byte-identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"audit-oracle", audit_oracle},
      {"fixture-improvement", improvement},
      {"similarity-properties", similarity_properties},
      {"gate-boundary", gate_boundary},
      {"link-reinsertion", reinsertion},
      {"chunker-partition", chunker_property},
      {"option2-integrity", option2_integrity},
      {"config-fidelity", config_fidelity},
      {"offline-determinism", cli_determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << "\n";
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
