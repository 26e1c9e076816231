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

// Test helpers for reading the fixture corpus.

#ifndef RESTRUCT_TESTS_FIXTURES_HPP_
#define RESTRUCT_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace restruct::testing {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(RESTRUCT_FIXTURE_DIR) / name;
}

inline std::string fixture(const std::string& name) { return read_file(fixture_path(name)); }

/// File names of every *.html fixture, sorted.
inline std::vector<std::string> corpus() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(RESTRUCT_FIXTURE_DIR))
    if (e.path().extension() == ".html") out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace restruct::testing

#endif  // RESTRUCT_TESTS_FIXTURES_HPP_
