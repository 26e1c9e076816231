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
#include "restruct/audit.hpp"
#include "restruct/html_parser.hpp"
#include "restruct/similarity.hpp"

namespace restruct {
namespace {

double lexical_score(const std::string& a, const std::string& b) {
  LexicalEmbedder e;
  return aggregated_similarity(extract_accessible(parse(a)), extract_accessible(parse(b)), e);
}

TEST(Lexical, CountsAndFolding) {
  auto v = lexical_embed("a b a");
  EXPECT_EQ(v, (std::map<std::string, double>{{"a", 2.0}, {"b", 1.0}}));
  EXPECT_TRUE(lexical_embed("").empty());
  EXPECT_EQ(lexical_embed("Add to cart!"), lexical_embed("add TO cart"));
}

TEST(Similarity, Examples) {
  std::string page = testing::fixture("mini-shop.html");
  EXPECT_EQ(lexical_score(page, page), 1.0);
  EXPECT_EQ(lexical_score("<p>red blender</p>", "<p>kitchen towel</p>"), 0.0);
  EXPECT_EQ(lexical_score("<p>add to cart buy now</p>", "<p>buy now add to cart</p>"), 1.0);
}

TEST(Similarity, EmptyContent) {
  EXPECT_EQ(lexical_score("", ""), 1.0);
  EXPECT_EQ(lexical_score("", "<p>x</p>"), 0.0);
}

TEST(Similarity, CosineRejectsDimensionMismatch) {
  EXPECT_THROW(cosine({1, 2}, {1}), EmbeddingError);
  EXPECT_EQ(cosine({0, 0}, {0, 0}), 1.0);
  EXPECT_EQ(cosine({1, 0}, {0, 0}), 0.0);
}

TEST(Similarity, SymmetricAndBounded) {
  std::mt19937 rng(7);
  const std::vector<std::string> words = {"cart", "buy", "shirt", "blue", "red", "home", "menu",
                                          "sale", "kettle", "gift"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), len(0, 12);
  auto random_page = [&] {
    std::string s = "<p>";
    for (std::size_t i = 0, n = len(rng); i < n; ++i) s += words[pick(rng)] + " ";
    return s + "</p>";
  };
  for (int i = 0; i < 200; ++i) {
    auto a = random_page(), b = random_page();
    double ab = lexical_score(a, b), ba = lexical_score(b, a);
    EXPECT_EQ(ab, ba);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(Gate, InclusiveThreshold) {
  EXPECT_TRUE(gate(0.92, 0.90));
  EXPECT_TRUE(gate(0.90, 0.90));
  EXPECT_FALSE(gate(0.89, 0.90));
  EXPECT_FALSE(gate(0.8999, kDefaultThreshold));
  EXPECT_EQ(kDefaultThreshold, 0.90);
}

TEST(NormalizeHref, FoldsSchemeAndHostOnly) {
  EXPECT_EQ(normalize_href(" HTTPS://Shop.Example/P/1#top "), "https://shop.example/P/1");
  EXPECT_EQ(normalize_href("/p/1#x"), "/p/1");
  EXPECT_EQ(normalize_href("//CDN.Example/a"), "//cdn.example/a");
  EXPECT_EQ(normalize_href("MAILTO:Someone@X"), "mailto:Someone@X");
}

TEST(MissingLinks, Examples) {
  Document a = parse("<a href=/p/1>Blender</a><a href=/p/2>Toaster</a>");
  EXPECT_TRUE(find_missing_links(a, a).empty());
  Document b = parse("<a href=/p/2>Toaster</a>");
  EXPECT_EQ(find_missing_links(a, b), (std::vector<MissingAnchor>{{"/p/1", "Blender"}}));
}

TEST(MissingLinks, TwentyLinksWithThreeDropped) {
  Document original = parse(testing::fixture("links-20.html"));
  Document generated = parse(testing::fixture("links-20.html"));
  std::vector<std::string> dropped = {"/p/3", "/p/11", "/p/20"};
  for (NodeId a : generated.elements_by_tag("a"))
    if (std::find(dropped.begin(), dropped.end(), generated[a].attr_or("href")) != dropped.end())
      generated.remove(a);
  auto missing = find_missing_links(original, generated);
  EXPECT_EQ(missing, (std::vector<MissingAnchor>{
                         {"/p/3", "Kettle"}, {"/p/11", "Whisk"}, {"/p/20", "Pot"}}));

  std::size_t link_name_before = run_audit(generated).count("LINK-NAME");
  Document fixed = reinsert_links(generated, missing);
  EXPECT_TRUE(find_missing_links(original, fixed).empty());
  EXPECT_EQ(run_audit(fixed).count("LINK-NAME"), link_name_before);
}

TEST(Reinsert, EmptyListLeavesDocumentUnchanged) {
  Document d = parse(testing::fixture("mini-shop.html"));
  EXPECT_EQ(serialize(reinsert_links(d, {})), serialize(d));
}

TEST(Reinsert, OneAnchorAddsExactlyOneLink) {
  Document d = parse("<main><p>x</p></main>");
  Document out = reinsert_links(d, {{"/p/1", "Blender"}});
  auto links = out.elements_by_tag("a");
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(out[links[0]].attr_or("href"), "/p/1");
  EXPECT_EQ(accessible_name(out, links[0]), "Blender");
}

TEST(Reinsert, Idempotent) {
  Document d = parse("<p>x</p>");
  std::vector<MissingAnchor> m = {{"/a", "A"}, {"/b", "B"}};
  Document once = reinsert_links(d, m);
  EXPECT_EQ(serialize(reinsert_links(once, m)), serialize(once));
}

TEST(Report, Json) {
  auto r = make_similarity_report(0.95, 0.9, "lexical", {{"/x", "X"}});
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(to_json(r).dump(),
            "{\"score\":0.95,\"threshold\":0.9,\"pass\":true,\"provider\":\"lexical\","
            "\"missing_anchors\":[{\"href\":\"/x\",\"text\":\"X\"}]}");
}

}  // namespace
}  // namespace restruct
