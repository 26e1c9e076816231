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

// Expected trees were produced once with html5lib (the reference HTML5
// parser for Python) and frozen here.

#include <gtest/gtest.h>

#include "restruct/dom.hpp"
#include "restruct/html_parser.hpp"

namespace restruct {
namespace {

std::string tree(const std::string& input) { return serialize(parse(input)); }

struct Case {
  const char* input;
  const char* expected;
};

class ReferenceTrees : public ::testing::TestWithParam<Case> {};

TEST_P(ReferenceTrees, MatchReferenceParser) {
  EXPECT_EQ(tree(GetParam().input), GetParam().expected) << GetParam().input;
}

INSTANTIATE_TEST_SUITE_P(
    Html5lib, ReferenceTrees,
    ::testing::Values(
        Case{"<p>a<p>b", "<html><head></head><body><p>a</p><p>b</p></body></html>"},
        Case{"", "<html><head></head><body></body></html>"},
        Case{"<ul><li>a<li>b</ul>",
             "<html><head></head><body><ul><li>a</li><li>b</li></ul></body></html>"},
        Case{"<title>t</title> <p>x</p> ",
             "<html><head><title>t</title> </head><body><p>x</p> </body></html>"},
        Case{"<h1>a<h2>b</h2>", "<html><head></head><body><h1>a</h1><h2>b</h2></body></html>"},
        Case{"</p>x", "<html><head></head><body>x</body></html>"},
        Case{"<div><p>a</div>b",
             "<html><head></head><body><div><p>a</p></div>b</body></html>"},
        Case{"<p>a<div>b</div>c",
             "<html><head></head><body><p>a</p><div>b</div>c</body></html>"},
        Case{"<a href=1>x<a href=2>y</a>",
             "<html><head></head><body><a href=\"1\">x</a><a href=\"2\">y</a></body></html>"},
        Case{"<dl><dt>a<dd>b<dt>c</dl>",
             "<html><head></head><body><dl><dt>a</dt><dd>b</dd><dt>c</dt></dl></body></html>"},
        Case{"<select><option>a<option>b</select>",
             "<html><head></head><body><select><option>a</option><option>b</option></select>"
             "</body></html>"},
        Case{"<pre>\nline</pre>", "<html><head></head><body><pre>line</pre></body></html>"},
        Case{"<textarea>\nx</textarea>",
             "<html><head></head><body><textarea>x</textarea></body></html>"},
        Case{"<p>a<h2>b</h2>", "<html><head></head><body><p>a</p><h2>b</h2></body></html>"},
        Case{"<button>a<button>b</button>",
             "<html><head></head><body><button>a</button><button>b</button></body></html>"},
        Case{"<br></br>", "<html><head></head><body><br><br></body></html>"},
        Case{"<html lang=en><body class=x><p>y",
             "<html lang=\"en\"><head></head><body class=\"x\"><p>y</p></body></html>"},
        Case{"<head></head>text", "<html><head></head><body>text</body></html>"},
        Case{"<script>if (a<b) x()</script><p>q",
             "<html><head><script>if (a<b) x()</script></head><body><p>q</p></body></html>"},
        Case{"<span>a</span></span>b",
             "<html><head></head><body><span>a</span>b</body></html>"},
        Case{"<li>a<li>b", "<html><head></head><body><li>a</li><li>b</li></body></html>"},
        Case{"<body><p>a</p></body><p>b",
             "<html><head></head><body><p>a</p><p>b</p></body></html>"},
        Case{"<h3>x</h3></h3>y", "<html><head></head><body><h3>x</h3>y</body></html>"},
        Case{"<p>one</p><!-- c --><p>two</p>",
             "<html><head></head><body><p>one</p><!-- c --><p>two</p></body></html>"}));

TEST(Parser, DecodesEntities) {
  Document d = parse("<p>&amp;&lt;&copy &#65;&#x42;</p>");
  auto p = d.elements_by_tag("p")[0];
  EXPECT_EQ(d[d[p].children[0]].text, "&<\xc2\xa9 AB");
}

TEST(Parser, DoctypeLandsInPrologue) {
  Document d = parse("<!DOCTYPE html><p>x");
  ASSERT_EQ(d.prologue().size(), 1u);
  EXPECT_EQ(serialize(d), "<!DOCTYPE html><html><head></head><body><p>x</p></body></html>");
}

TEST(Parser, FirstDuplicateAttributeWins) {
  Document d = parse("<p id=a id=b class=c>x</p>");
  auto p = d.elements_by_tag("p")[0];
  EXPECT_EQ(d[p].attr_or("id"), "a");
  EXPECT_EQ(d[p].attributes.size(), 2u);
}

TEST(Parser, NormalizesLineEndingsAndStripsBom) {
  Document d = parse("\xEF\xBB\xBF<p>a\r\nb\rc</p>");
  auto p = d.elements_by_tag("p")[0];
  EXPECT_EQ(d[d[p].children[0]].text, "a\nb\nc");
}

TEST(Parser, RejectsInvalidUtf8) { EXPECT_THROW(parse("<p>\xff</p>"), ParseError); }

TEST(Parser, FragmentStartsInBody) {
  Document d = parse_fragment("<title>t</title><p>x</p>");
  // In body context a title element stays where it was written.
  EXPECT_EQ(d.elements_by_tag("title").size(), 1u);
  EXPECT_EQ(d[*d.body()].children.size(), 2u);
}

TEST(Parser, UnclosedMarkupIsRecovered) {
  EXPECT_NO_THROW(parse("<div><p><a href='x'>unterminated"));
  EXPECT_NO_THROW(parse("<!-- never closed"));
  EXPECT_NO_THROW(parse("<p attr=\"open"));
  EXPECT_NO_THROW(parse("</"));
}

}  // namespace
}  // namespace restruct
