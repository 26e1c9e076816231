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

// Lenient HTML parser.
//
// A reduced version of the browser tree-construction algorithm: implied
// html/head/body, head-only elements routed to head, paragraph/list/heading
// auto-closing, scope-limited end tags, raw text elements. It does not do
// table foster parenting or formatting-element reconstruction; those only
// change how badly broken markup nests, never which text survives.

#ifndef RESTRUCT_HTML_PARSER_HPP_
#define RESTRUCT_HTML_PARSER_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "restruct/dom.hpp"
#include "restruct/text.hpp"

namespace restruct {

class ParseError : public Error {
 public:
  using Error::Error;
};

namespace html {
namespace detail {

struct Entity {
  std::string_view name;
  char32_t code;
};

// Named references most often seen on commerce pages. Unknown names are left
// as literal text.
inline constexpr Entity kEntities[] = {
    {"AElig", 0xC6},   {"Aacute", 0xC1}, {"Agrave", 0xC0}, {"Auml", 0xC4},   {"Ccedil", 0xC7},
    {"Eacute", 0xC9},  {"Egrave", 0xC8}, {"Ntilde", 0xD1}, {"Oacute", 0xD3}, {"Ouml", 0xD6},
    {"Uacute", 0xDA},  {"Uuml", 0xDC},   {"aacute", 0xE1}, {"acute", 0xB4},  {"aelig", 0xE6},
    {"agrave", 0xE0},  {"amp", '&'},     {"apos", '\''},   {"auml", 0xE4},   {"bdquo", 0x201E},
    {"brvbar", 0xA6},  {"bull", 0x2022}, {"ccedil", 0xE7}, {"cent", 0xA2},   {"copy", 0xA9},
    {"curren", 0xA4},  {"dagger", 0x2020}, {"darr", 0x2193}, {"deg", 0xB0},  {"divide", 0xF7},
    {"eacute", 0xE9},  {"egrave", 0xE8}, {"euml", 0xEB},   {"euro", 0x20AC}, {"frac12", 0xBD},
    {"frac14", 0xBC},  {"frac34", 0xBE}, {"gt", '>'},      {"hellip", 0x2026}, {"iacute", 0xED},
    {"iexcl", 0xA1},   {"iquest", 0xBF}, {"laquo", 0xAB},  {"larr", 0x2190}, {"ldquo", 0x201C},
    {"lsaquo", 0x2039}, {"lsquo", 0x2018}, {"lt", '<'},    {"mdash", 0x2014}, {"micro", 0xB5},
    {"middot", 0xB7},  {"minus", 0x2212}, {"nbsp", 0xA0},  {"ndash", 0x2013}, {"not", 0xAC},
    {"ntilde", 0xF1},  {"oacute", 0xF3}, {"ouml", 0xF6},   {"para", 0xB6},   {"plusmn", 0xB1},
    {"pound", 0xA3},   {"quot", '"'},    {"raquo", 0xBB},  {"rarr", 0x2192}, {"rdquo", 0x201D},
    {"reg", 0xAE},     {"rsaquo", 0x203A}, {"rsquo", 0x2019}, {"sbquo", 0x201A}, {"sect", 0xA7},
    {"shy", 0xAD},     {"star", 0x2606}, {"szlig", 0xDF},  {"thinsp", 0x2009}, {"times", 0xD7},
    {"trade", 0x2122}, {"uacute", 0xFA}, {"uarr", 0x2191}, {"uml", 0xA8},    {"uuml", 0xFC},
    {"yen", 0xA5},     {"zwj", 0x200D},  {"zwnj", 0x200C},
};

// Legacy names browsers accept without the trailing semicolon.
inline bool legacy_without_semicolon(std::string_view name) {
  return name == "amp" || name == "lt" || name == "gt" || name == "quot" || name == "nbsp" ||
         name == "copy" || name == "reg";
}

inline std::optional<char32_t> lookup_entity(std::string_view name) {
  for (const auto& e : kEntities)
    if (e.name == name) return e.code;
  return std::nullopt;
}

inline std::string decode_entities(std::string_view s, bool in_attribute) {
  if (s.find('&') == std::string_view::npos) return std::string(s);
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c != '&') {
      out.push_back(c);
      ++i;
      continue;
    }
    if (i + 1 < s.size() && s[i + 1] == '#') {
      std::size_t j = i + 2;
      bool hex = j < s.size() && (s[j] == 'x' || s[j] == 'X');
      if (hex) ++j;
      std::size_t digits_start = j;
      std::uint32_t value = 0;
      while (j < s.size()) {
        char d = s[j];
        int v;
        if (text::is_digit(d))
          v = d - '0';
        else if (hex && d >= 'a' && d <= 'f')
          v = d - 'a' + 10;
        else if (hex && d >= 'A' && d <= 'F')
          v = d - 'A' + 10;
        else
          break;
        if (value < 0x110000) value = value * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
        ++j;
      }
      if (j == digits_start) {
        out.push_back(c);
        ++i;
        continue;
      }
      if (j < s.size() && s[j] == ';') ++j;
      text::append_utf8(out, value);
      i = j;
      continue;
    }
    std::size_t j = i + 1;
    while (j < s.size() && (text::is_alpha(s[j]) || text::is_digit(s[j])) && j - i <= 32) ++j;
    std::string_view name = s.substr(i + 1, j - i - 1);
    const bool semicolon = j < s.size() && s[j] == ';';
    auto code = lookup_entity(name);
    if (code && (semicolon || (!in_attribute && legacy_without_semicolon(name)))) {
      text::append_utf8(out, *code);
      i = semicolon ? j + 1 : j;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

enum class TokenType { start_tag, end_tag, text, comment, doctype };

struct Token {
  TokenType type;
  std::string name;  // tag name (lowercase) or doctype name
  std::vector<Attribute> attributes;
  std::string data;  // text / comment payload
  bool self_closing = false;
};

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view input) : in_(input) {}

  std::optional<Token> next() {
    if (!pending_.empty()) {
      Token t = std::move(pending_.front());
      pending_.erase(pending_.begin());
      return t;
    }
    if (pos_ >= in_.size()) return std::nullopt;
    if (in_[pos_] == '<') {
      if (auto t = markup()) return t;
    }
    return text_run();
  }

 private:
  Token text_run() {
    std::size_t start = pos_;
    ++pos_;  // the first char is text even if it is '<'
    while (pos_ < in_.size()) {
      if (in_[pos_] == '<' && pos_ + 1 < in_.size()) {
        char n = in_[pos_ + 1];
        if (text::is_alpha(n) || n == '/' || n == '!' || n == '?') break;
      }
      ++pos_;
    }
    return Token{TokenType::text, {}, {}, decode_entities(in_.substr(start, pos_ - start), false)};
  }

  std::optional<Token> markup() {
    std::string_view rest = in_.substr(pos_);
    if (rest.starts_with("<!--")) {
      std::size_t end = in_.find("-->", pos_ + 4);
      std::string data(in_.substr(pos_ + 4, end == std::string_view::npos ? std::string_view::npos
                                                                          : end - pos_ - 4));
      pos_ = end == std::string_view::npos ? in_.size() : end + 3;
      return Token{TokenType::comment, {}, {}, std::move(data)};
    }
    if (rest.size() >= 2 && (rest[1] == '!' || rest[1] == '?')) {
      std::size_t end = in_.find('>', pos_);
      std::string_view body = in_.substr(pos_ + 2, end == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : end - pos_ - 2);
      pos_ = end == std::string_view::npos ? in_.size() : end + 1;
      if (rest[1] == '!' && text::istarts_with(body, "doctype")) {
        std::string name = text::lower(text::trim(body.substr(7)));
        auto sp = name.find_first_of(" \t\n\r\f");
        if (sp != std::string::npos) name.resize(sp);
        return Token{TokenType::doctype, name.empty() ? "html" : name, {}, {}};
      }
      return Token{TokenType::comment, {}, {}, std::string(body)};
    }
    if (rest.size() >= 2 && rest[1] == '/') {
      if (rest.size() >= 3 && text::is_alpha(rest[2])) {
        std::size_t i = pos_ + 2;
        std::size_t name_start = i;
        while (i < in_.size() && !text::is_space(in_[i]) && in_[i] != '/' && in_[i] != '>') ++i;
        std::string name = text::lower(in_.substr(name_start, i - name_start));
        std::size_t end = in_.find('>', i);
        pos_ = end == std::string_view::npos ? in_.size() : end + 1;
        return Token{TokenType::end_tag, std::move(name), {}, {}};
      }
      if (rest.size() >= 3 && rest[2] == '>') {
        pos_ += 3;
        return next_or_empty();
      }
      std::size_t end = in_.find('>', pos_);
      std::string data(in_.substr(pos_ + 2, end == std::string_view::npos ? std::string_view::npos
                                                                          : end - pos_ - 2));
      pos_ = end == std::string_view::npos ? in_.size() : end + 1;
      return Token{TokenType::comment, {}, {}, std::move(data)};
    }
    if (rest.size() >= 2 && text::is_alpha(rest[1])) return start_tag();
    return std::nullopt;
  }

  std::optional<Token> next_or_empty() {
    if (pos_ >= in_.size()) return Token{TokenType::text, {}, {}, {}};
    return next();
  }

  Token start_tag() {
    std::size_t i = pos_ + 1;
    std::size_t name_start = i;
    while (i < in_.size() && !text::is_space(in_[i]) && in_[i] != '/' && in_[i] != '>') ++i;
    Token tok{TokenType::start_tag, text::lower(in_.substr(name_start, i - name_start)), {}, {}};
    while (i < in_.size()) {
      while (i < in_.size() && (text::is_space(in_[i]) || in_[i] == '/')) {
        if (in_[i] == '/' && i + 1 < in_.size() && in_[i + 1] == '>') tok.self_closing = true;
        ++i;
      }
      if (i >= in_.size()) break;
      if (in_[i] == '>') {
        ++i;
        break;
      }
      std::size_t an = i;
      ++i;  // first char may be '='
      while (i < in_.size() && !text::is_space(in_[i]) && in_[i] != '/' && in_[i] != '>' &&
             in_[i] != '=')
        ++i;
      std::string name = text::lower(in_.substr(an, i - an));
      while (i < in_.size() && text::is_space(in_[i])) ++i;
      std::string value;
      if (i < in_.size() && in_[i] == '=') {
        ++i;
        while (i < in_.size() && text::is_space(in_[i])) ++i;
        if (i < in_.size() && (in_[i] == '"' || in_[i] == '\'')) {
          char q = in_[i++];
          std::size_t vs = i;
          while (i < in_.size() && in_[i] != q) ++i;
          value = decode_entities(in_.substr(vs, i - vs), true);
          if (i < in_.size()) ++i;
        } else {
          std::size_t vs = i;
          while (i < in_.size() && !text::is_space(in_[i]) && in_[i] != '>') ++i;
          value = decode_entities(in_.substr(vs, i - vs), true);
        }
      }
      const bool duplicate = std::any_of(tok.attributes.begin(), tok.attributes.end(),
                                         [&](const Attribute& a) { return a.name == name; });
      if (!duplicate) tok.attributes.push_back({std::move(name), std::move(value)});
    }
    pos_ = i;
    if (is_raw_text(tok.name) || is_escapable_raw_text(tok.name)) raw_content(tok.name);
    return tok;
  }

  // Queues the content and the end tag of a raw text element.
  void raw_content(const std::string& name) {
    std::size_t search = pos_;
    std::size_t end = std::string_view::npos;
    while (true) {
      std::size_t lt = in_.find("</", search);
      if (lt == std::string_view::npos) break;
      std::string_view cand = in_.substr(lt + 2);
      if (text::istarts_with(cand, name)) {
        std::size_t after = lt + 2 + name.size();
        if (after >= in_.size() || text::is_space(in_[after]) || in_[after] == '>' ||
            in_[after] == '/') {
          end = lt;
          break;
        }
      }
      search = lt + 2;
    }
    std::string_view body = in_.substr(pos_, end == std::string_view::npos ? std::string_view::npos
                                                                          : end - pos_);
    std::string data = is_raw_text(name) ? std::string(body) : decode_entities(body, false);
    if (!data.empty()) pending_.push_back(Token{TokenType::text, {}, {}, std::move(data)});
    pending_.push_back(Token{TokenType::end_tag, name, {}, {}});
    if (end == std::string_view::npos) {
      pos_ = in_.size();
    } else {
      std::size_t gt = in_.find('>', end);
      pos_ = gt == std::string_view::npos ? in_.size() : gt + 1;
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::vector<Token> pending_;
};

template <std::size_t N>
constexpr bool one_of(std::string_view tag, const std::array<std::string_view, N>& set) {
  return std::find(set.begin(), set.end(), tag) != set.end();
}

inline constexpr std::array<std::string_view, 9> kHeadOnly = {
    "base", "basefont", "bgsound", "link", "meta", "title", "style", "script", "noframes"};

// Start tags that implicitly close an open <p>.
inline constexpr std::array<std::string_view, 40> kClosesP = {
    "address", "article", "aside",   "blockquote", "center", "details", "dialog", "dir",
    "div",     "dl",      "fieldset", "figcaption", "figure", "footer", "header", "hgroup",
    "main",    "menu",    "nav",     "ol",         "p",      "search",  "section", "summary",
    "ul",      "h1",      "h2",      "h3",         "h4",     "h5",      "h6",      "pre",
    "listing", "form",    "plaintext", "table",    "hr",     "dd",      "dt",      "li"};

// Elements whose end tags use the in-scope rule.
inline constexpr std::array<std::string_view, 80> kSpecial = {
    "address", "applet",   "area",     "article",  "aside",    "base",      "basefont",
    "bgsound", "blockquote", "body",   "br",       "button",   "caption",   "center",
    "col",     "colgroup", "dd",       "details",  "dir",      "div",       "dl",
    "dt",      "embed",    "fieldset", "figcaption", "figure", "footer",    "form",
    "frame",   "frameset", "h1",       "h2",       "h3",       "h4",        "h5",
    "h6",      "head",     "header",   "hgroup",   "hr",       "html",      "iframe",
    "img",     "input",    "keygen",   "li",       "link",     "listing",   "main",
    "marquee", "menu",     "meta",     "nav",      "noembed",  "noframes",  "noscript",
    "object",  "ol",       "p",        "param",    "plaintext", "pre",      "script",
    "search",  "section",  "select",   "source",   "style",    "summary",   "table",
    "tbody",   "td",       "template", "textarea", "tfoot",    "th",        "thead",
    "title",   "tr",       "track"};

inline constexpr std::array<std::string_view, 9> kScopeStop = {
    "applet", "caption", "html", "table", "td", "th", "marquee", "object", "template"};

// Elements popped silently when an enclosing element is closed.
inline constexpr std::array<std::string_view, 10> kImpliedEnd = {
    "dd", "dt", "li", "optgroup", "option", "p", "rb", "rp", "rt", "rtc"};

enum class Mode { before_html, before_head, in_head, after_head, in_body };

class TreeBuilder {
 public:
  explicit TreeBuilder(Document& doc) : doc_(doc) {}

  void start_fragment() {
    ensure_body();
  }

  void run(std::string_view input) {
    Tokenizer tz(input);
    while (auto tok = tz.next()) process(*tok);
    ensure_body();
  }

 private:
  NodeId current() const { return stack_.back(); }
  const std::string& tag_of(NodeId id) const { return doc_[id].tag; }

  void ensure_html(std::vector<Attribute> attrs = {}) {
    if (html_) return;
    html_ = doc_.create_element("html", std::move(attrs));
    doc_.set_root(*html_);
    stack_ = {*html_};
    mode_ = Mode::before_head;
  }

  void ensure_head() {
    ensure_html();
    if (head_) return;
    head_ = doc_.create_element("head");
    doc_.append_child(*html_, *head_);
    stack_.push_back(*head_);
    mode_ = Mode::in_head;
  }

  void ensure_body(std::vector<Attribute> attrs = {}) {
    ensure_head();
    if (body_) return;
    // Anything still open in head is closed by the implied body.
    while (stack_.size() > 1) stack_.pop_back();
    body_ = doc_.create_element("body", std::move(attrs));
    doc_.append_child(*html_, *body_);
    stack_.push_back(*body_);
    mode_ = Mode::in_body;
  }

  void insert_text(NodeId parent, std::string_view data) {
    if (data.empty()) return;
    auto& kids = doc_.node(parent).children;
    if (!kids.empty() && doc_[kids.back()].is_text()) {
      doc_.node(kids.back()).text.append(data);
      return;
    }
    NodeId t = doc_.create_text(std::string(data));
    doc_.append_child(parent, t);
  }

  NodeId insert_element(const Token& tok, bool push) {
    NodeId el = doc_.create_element(tok.name, tok.attributes);
    doc_.append_child(current(), el);
    if (push && !is_void(tok.name)) stack_.push_back(el);
    return el;
  }

  bool in_scope(std::string_view name, std::string_view extra1 = {},
                std::string_view extra2 = {}) const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      const std::string& t = tag_of(*it);
      if (t == name) return true;
      if (one_of(t, kScopeStop) || (!extra1.empty() && t == extra1) ||
          (!extra2.empty() && t == extra2))
        return false;
    }
    return false;
  }

  void pop_until(std::string_view name) {
    while (stack_.size() > 1) {
      bool hit = tag_of(current()) == name;
      stack_.pop_back();
      if (hit) return;
    }
  }

  void close_p_if_open() {
    if (in_scope("p", "button")) pop_until("p");
  }

  // Closes the nearest open `name` unless a scope boundary intervenes.
  void close_list_item(std::initializer_list<std::string_view> names) {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      const std::string& t = tag_of(*it);
      if (std::find(names.begin(), names.end(), t) != names.end()) {
        std::string target = t;
        pop_until(target);
        return;
      }
      if (one_of(t, kSpecial) && t != "address" && t != "div" && t != "p") return;
    }
  }

  void process(const Token& tok) {
    switch (tok.type) {
      case TokenType::doctype:
        if (!html_) doc_.add_prologue(doc_.create_doctype(tok.name));
        return;
      case TokenType::comment: {
        NodeId c = doc_.create_comment(tok.data);
        if (!html_) {
          doc_.add_prologue(c);
        } else if (mode_ == Mode::after_head) {
          doc_.append_child(*html_, c);
        } else {
          doc_.append_child(current(), c);
        }
        return;
      }
      case TokenType::text:
        text_token(tok.data);
        return;
      case TokenType::start_tag:
        start_tag(tok);
        return;
      case TokenType::end_tag:
        end_tag(tok.name);
        return;
    }
  }

  void text_token(std::string_view data) {
    if (data.empty()) return;
    if (html_ && (is_raw_text(tag_of(current())) || is_escapable_raw_text(tag_of(current())))) {
      std::string_view body = data;
      const std::string& t = tag_of(current());
      if (t == "textarea" && doc_[current()].children.empty() && !body.empty() &&
          body.front() == '\n')
        body.remove_prefix(1);
      insert_text(current(), body);
      return;
    }
    std::size_t ws = 0;
    while (ws < data.size() && text::is_space(data[ws])) ++ws;
    switch (mode_) {
      case Mode::before_html:
      case Mode::before_head:
        if (ws == data.size()) return;
        ensure_body();
        insert_text(current(), data.substr(ws));
        return;
      case Mode::in_head:
        insert_text(current(), data.substr(0, ws));
        if (ws == data.size()) return;
        ensure_body();
        insert_text(current(), data.substr(ws));
        return;
      case Mode::after_head:
        insert_text(*html_, data.substr(0, ws));
        if (ws == data.size()) return;
        ensure_body();
        insert_text(current(), data.substr(ws));
        return;
      case Mode::in_body: {
        // A newline right after <pre>/<listing> is not content.
        const std::string& t = tag_of(current());
        if ((t == "pre" || t == "listing") && doc_[current()].children.empty() &&
            data.front() == '\n')
          data.remove_prefix(1);
        insert_text(current(), data);
        return;
      }
    }
  }

  void start_tag(const Token& tok) {
    const std::string& name = tok.name;
    if (name == "html") {
      if (!html_) {
        ensure_html(tok.attributes);
        return;
      }
      merge_attributes(*html_, tok.attributes);
      return;
    }
    if (mode_ != Mode::in_body) {
      if (name == "head") {
        if (!head_) ensure_head();
        return;
      }
      if (one_of(name, kHeadOnly) || (name == "noscript" && mode_ != Mode::after_head)) {
        ensure_head();
        // Content after </head> still goes into head.
        if (mode_ == Mode::after_head) {
          stack_.push_back(*head_);
          insert_element(tok, true);
          if (is_void(name)) stack_.pop_back();
          return;
        }
        insert_element(tok, true);
        return;
      }
      if (name == "body") {
        ensure_body(tok.attributes);
        return;
      }
      ensure_body();
    }
    in_body_start(tok);
  }

  void merge_attributes(NodeId id, const std::vector<Attribute>& attrs) {
    auto& n = doc_.node(id);
    for (const auto& a : attrs)
      if (!n.has_attr(a.name)) n.attributes.push_back(a);
  }

  void in_body_start(const Token& tok) {
    const std::string& name = tok.name;
    if (name == "body") {
      merge_attributes(*body_, tok.attributes);
      return;
    }
    if (name == "head") return;
    if (name == "li") {
      close_list_item({"li"});
    } else if (name == "dd" || name == "dt") {
      close_list_item({"dd", "dt"});
    }
    if (one_of(name, kClosesP)) close_p_if_open();
    if (heading_level(name) > 0 && heading_level(tag_of(current())) > 0) stack_.pop_back();
    if (name == "a" && std::any_of(stack_.begin(), stack_.end(),
                                   [&](NodeId id) { return tag_of(id) == "a"; }))
      pop_until("a");
    if (name == "option" && tag_of(current()) == "option") stack_.pop_back();
    if (name == "optgroup") {
      if (tag_of(current()) == "option") stack_.pop_back();
      if (tag_of(current()) == "optgroup") stack_.pop_back();
    }
    if (name == "tr") {
      for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
        const std::string& t = tag_of(*it);
        if (t == "tr") {
          pop_until("tr");
          break;
        }
        if (t == "table" || t == "tbody" || t == "thead" || t == "tfoot" || t == "html") break;
      }
    }
    if (name == "td" || name == "th") {
      for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
        const std::string& t = tag_of(*it);
        if (t == "td" || t == "th") {
          std::string target = t;
          pop_until(target);
          break;
        }
        if (t == "tr" || t == "table" || t == "html") break;
      }
    }
    if (name == "button" && in_scope("button")) pop_until("button");
    insert_element(tok, true);
  }

  void end_tag(const std::string& name) {
    if (name == "br") {  // parsed as <br>
      start_tag(Token{TokenType::start_tag, "br", {}, {}, false});
      return;
    }
    if (name == "html" || name == "body") return;
    if (!html_) return;
    if (name == "head") {
      if (mode_ == Mode::in_head) {
        while (stack_.size() > 1) stack_.pop_back();
        mode_ = Mode::after_head;
      }
      return;
    }
    if (mode_ != Mode::in_body) {
      // Only elements opened inside head can be closed before body.
      if (stack_.size() > 1 && tag_of(current()) == name) stack_.pop_back();
      return;
    }
    if (name == "p") {
      if (in_scope("p", "button")) pop_until("p");
      return;
    }
    if (name == "li") {
      if (in_scope("li", "ol", "ul")) pop_until("li");
      return;
    }
    if (heading_level(name) > 0) {
      for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
        const std::string& t = tag_of(*it);
        if (heading_level(t) > 0) {
          std::string target = t;
          pop_until(target);
          return;
        }
        if (one_of(t, kScopeStop)) return;
      }
      return;
    }
    if (one_of(name, kSpecial)) {
      if (in_scope(name)) pop_until(name);
      return;
    }
    // Any other end tag: close the nearest matching element unless a special
    // element sits in between.
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const std::string& t = tag_of(stack_[i]);
      if (t == name) {
        stack_.resize(i);
        return;
      }
      if (one_of(t, kSpecial) && !one_of(t, kImpliedEnd)) return;
    }
  }

  Document& doc_;
  std::vector<NodeId> stack_;
  std::optional<NodeId> html_, head_, body_;
  Mode mode_ = Mode::before_html;
};

inline std::string prepare_input(std::string_view input) {
  if (!text::valid_utf8(input)) throw ParseError("input is not valid UTF-8");
  if (input.starts_with("\xEF\xBB\xBF")) input.remove_prefix(3);
  std::string out;
  out.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < input.size() && input[i + 1] == '\n') ++i;
    } else if (input[i] != '\0') {
      out.push_back(input[i]);
    }
  }
  return out;
}

}  // namespace detail
}  // namespace html

/// Parses arbitrary HTML with browser-style error recovery. Throws
/// ParseError only when the input is not valid UTF-8.
inline Document parse(std::string_view input) {
  std::string prepared = html::detail::prepare_input(input);
  Document doc;
  html::detail::TreeBuilder builder(doc);
  builder.run(prepared);
  return doc;
}

/// Parses `input` as body content (html/head/body already open), so that
/// head-only elements such as <title> or <meta> stay where they appear.
inline Document parse_fragment(std::string_view input) {
  std::string prepared = html::detail::prepare_input(input);
  Document doc;
  html::detail::TreeBuilder builder(doc);
  builder.start_fragment();
  builder.run(prepared);
  return doc;
}

}  // namespace restruct

#endif  // RESTRUCT_HTML_PARSER_HPP_
