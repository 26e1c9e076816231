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

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "restruct/extract.hpp"
#include "restruct/html_parser.hpp"
#include "restruct/patches.hpp"

namespace restruct {
namespace {

std::vector<std::string> text_multiset(const Document& d) {
  std::vector<std::string> out;
  d.walk(d.root(), [&](const DomNode& n) {
    if (n.is_text()) out.push_back(n.text);
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Records, DirectMapping) {
  Document d = parse("<h2 id=t class=\"a b\">Hi</h2>");
  NodeId h2 = d.elements_by_tag("h2").at(0);
  EXPECT_EQ(serialize_tag_records(d),
            "[{\"node\":" + std::to_string(h2.value) +
                ",\"tag\":\"h2\",\"id\":\"t\",\"classes\":[\"a\",\"b\"],\"attributes\":[],"
                "\"text\":\"Hi\"}]");
}

TEST(Records, WhitespaceOnlyNonInteractiveElementsAreSkipped) {
  Document d = parse("<div>  \n </div><span></span><button></button>");
  auto records = tag_records(d);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].tag, "button");
}

TEST(Records, ScriptsAreSkipped) {
  EXPECT_EQ(serialize_tag_records(parse("<script>x</script><noscript><p>n</p></noscript>")), "[]");
}

TEST(Records, MiniShopMatchesGolden) {
  Document d = parse(testing::fixture("mini-shop.html"));
  auto golden = nlohmann::json::parse(testing::fixture("mini-shop.records.json"));
  EXPECT_EQ(nlohmann::json::parse(serialize_tag_records(d)), golden);
}

TEST(Records, ChunksStayWithinBudgetAndKeepOrder) {
  Document d = parse(testing::fixture("mini-shop.html"));
  auto records = tag_records(d);
  auto chunks = chunk_records(records, 100);
  ASSERT_GT(chunks.size(), 1u);
  std::vector<NodeId> ids;
  for (const auto& c : chunks) {
    if (!c.oversize) {
      EXPECT_LE(c.token_estimate, 100u);
    }
    EXPECT_TRUE(nlohmann::json::parse(c.html).is_array());
    ids.insert(ids.end(), c.covered_ids.begin(), c.covered_ids.end());
  }
  ASSERT_EQ(ids.size(), records.size());
  for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], records[i].node);
}

TEST(ParsePatches, Examples) {
  Document d = parse("<div>x</div><p>y</p>");
  NodeId div = d.elements_by_tag("div").at(0);
  auto r = parse_patches("[{\"node\":" + std::to_string(div.value) + ",\"new_tag\":\"h2\"}]", d);
  ASSERT_EQ(r.patches.size(), 1u);
  EXPECT_EQ(r.patches[0].new_tag, "h2");
  EXPECT_TRUE(r.rejected.empty());

  r = parse_patches("[{\"node\":9999,\"new_tag\":\"h2\"}]", d);
  EXPECT_TRUE(r.patches.empty());
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].index, 0u);

  r = parse_patches("Sure! Here you go:\n```json\n[{\"node\":" + std::to_string(div.value) +
                        ",\"set_attributes\":[[\"role\",\"heading\"]]}]\n```\nDone.",
                    d);
  ASSERT_EQ(r.patches.size(), 1u);
  EXPECT_EQ(r.patches[0].set_attributes,
            (std::vector<std::pair<std::string, std::string>>{{"role", "heading"}}));
}

TEST(ParsePatches, RejectsUnsafeEntries) {
  Document d = parse("<div>x</div><img src=a>");
  auto div = std::to_string(d.elements_by_tag("div").at(0).value);
  auto img = std::to_string(d.elements_by_tag("img").at(0).value);
  auto r = parse_patches("[{\"node\":" + div + ",\"new_tag\":\"script\"},"
                         "{\"node\":" + div + ",\"set_attributes\":{\"onclick\":\"x()\"}},"
                         "{\"node\":" + div + ",\"new_tag\":\"br\"},"
                         "{\"node\":" + img + ",\"new_tag\":\"span\"},"
                         "{\"node\":" + div + ",\"new_tag\":\"h1 x\"},"
                         "{\"node\":" + div + "},"
                         "{\"node\":\"" + div + "\",\"new_tag\":\"h2\"},"
                         "{\"node\":" + div + ",\"new_tag\":\"div\"}]",
                         d);
  EXPECT_TRUE(r.patches.empty());
  EXPECT_EQ(r.rejected.size(), 8u);
}

TEST(ParsePatches, MalformedResponsesThrow) {
  Document d = parse("<p>x</p>");
  EXPECT_THROW(parse_patches("no array here", d), PatchFormatError);
  EXPECT_THROW(parse_patches("[{\"node\":1,]", d), PatchFormatError);
  EXPECT_TRUE(parse_patches("[]", d).patches.empty());
}

TEST(ApplyPatches, Examples) {
  Document d = parse("<div>Title</div><button>+</button>");
  NodeId div = d.elements_by_tag("div").at(0);
  NodeId button = d.elements_by_tag("button").at(0);
  Document out = apply_patches(d, {{div, "h1", {}, {}},
                                   {button, std::nullopt, {{"aria-label", "Add item to cart"}}, {}}});
  EXPECT_EQ(out[div].tag, "h1");
  EXPECT_EQ(a11y::text_content(out, div), "Title");
  auto items = extract_accessible(out).items;
  EXPECT_TRUE(std::any_of(items.begin(), items.end(), [](const AccessibleItem& i) {
    return i.kind == ItemKind::aria_label && i.text == "Add item to cart";
  }));
  EXPECT_TRUE(structurally_equal(apply_patches(d, {}), d));
  EXPECT_THROW(apply_patches(d, {{NodeId{9999}, "p", {}, {}}}), Error);
}

TEST(ApplyPatches, PreservesTextMultisetOnRandomPatchSets) {
  Document d = parse(testing::fixture("mini-shop.html"));
  auto records = tag_records(d);
  const auto before = text_multiset(d);
  const char* tags[] = {"h1", "h2", "h3", "p", "span", "div", "section", "nav", "strong"};
  std::mt19937 rng(99);
  for (int round = 0; round < 200; ++round) {
    std::string json = "[";
    for (int i = 0, n = static_cast<int>(rng() % 8); i < n; ++i) {
      const auto& r = records[rng() % records.size()];
      if (i) json += ",";
      json += "{\"node\":" + std::to_string(r.node.value) + ",\"new_tag\":\"" +
              tags[rng() % 9] + "\",\"set_attributes\":[[\"aria-label\",\"L" +
              std::to_string(i) + "\"]]}";
    }
    json += "]";
    auto parsed = parse_patches(json, d);
    EXPECT_EQ(text_multiset(apply_patches(d, parsed.patches)), before) << json;
  }
}

TEST(PatchJson, CarriesPathLocator) {
  Document d = parse("<p>a</p><p>b</p>");
  NodeId p2 = d.elements_by_tag("p").at(1);
  TagPatch patch{p2, "h2", {{"role", "x"}}, {"class"}};
  EXPECT_EQ(to_json(patch, d).dump(),
            "{\"node\":" + std::to_string(p2.value) +
                ",\"path\":\"html>body>p:nth-of-type(2)\",\"new_tag\":\"h2\","
                "\"set_attributes\":[[\"role\",\"x\"]],\"remove_attributes\":[\"class\"]}");
}

}  // namespace
}  // namespace restruct
