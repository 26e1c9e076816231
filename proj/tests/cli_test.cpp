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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

#include "fixtures.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using restruct::testing::fixture_path;
using restruct::testing::read_file;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string("'") + RESTRUCT_CLI_PATH + "' " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  Run r;
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fx(const std::string& name) { return "'" + fixture_path(name).string() + "'"; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("restruct-cli-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, AuditJson) {
  auto r = run("audit " + fx("four-violations.html") + " --format json");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["instances"], 4);
  EXPECT_EQ(run("audit " + fx("four-violations.html") + " --fail-on-violations").code, 1);
  EXPECT_EQ(run("audit " + fx("minimal-conformant.html") + " --fail-on-violations").code, 0);
}

TEST_F(CliTest, ReorganizeOfflineWritesFiles) {
  auto r = run("reorganize " + fx("mini-shop.html") + " --provider offline --out " +
               tmp("out.html") + " --report " + tmp("r.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("similarity 1"), std::string::npos);
  auto report = nlohmann::json::parse(read_file(tmp("r.json")));
  EXPECT_EQ(report["html"].get<std::string>(), read_file(tmp("out.html")));
  EXPECT_FALSE(report["patches"].empty());
}

TEST_F(CliTest, OfflineRunsAreByteIdentical) {
  for (const char* mode : {"regenerate", "reorganize"}) {
    for (const char* out : {"a.html", "b.html"})
      ASSERT_EQ(run(std::string(mode) + " " + fx("product-detail.html") + " --out " + tmp(out)).code,
                0);
    EXPECT_EQ(read_file(tmp("a.html")), read_file(tmp("b.html"))) << mode;
  }
}

TEST_F(CliTest, CompareIdentity) {
  auto r = run("compare " + fx("mini-shop.html") + " " + fx("mini-shop.html") + " --format json");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["similarity"]["score"], 1.0);
  EXPECT_EQ(j["audit_diff"]["delta"], 0);
}

TEST_F(CliTest, StdinInput) {
  auto r = run("audit - --format json < " + fx("four-violations.html"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["instances"], 4);
}

TEST_F(CliTest, MockScript) {
  std::ofstream(tmp("script.json")) << R"(["<p>unrelated words</p>"])";
  auto r = run("regenerate " + fx("mini-shop.html") + " --provider mock --attempts 1 --mock-script " +
               tmp("script.json"));
  EXPECT_EQ(r.code, 1);  // gate failure

  std::ofstream(tmp("echo.json")) << R"({"steps":[{"echo":true}],"cycle":true})";
  r = run("regenerate " + fx("links-20.html") + " --provider mock --format json --mock-script " +
          tmp("echo.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["similarity"]["score"], 1.0);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("regenerate " + fx("mini-shop.html") + " --provider psychic").code, 2);
  EXPECT_EQ(run("regenerate " + fx("mini-shop.html") + " --budget 4").code, 2);
  EXPECT_EQ(run("regenerate " + fx("mini-shop.html") + " --provider mock").code, 2);
  EXPECT_EQ(run("audit /nonexistent/page.html").code, 2);
}

}  // namespace
