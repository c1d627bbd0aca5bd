#pragma once

// Tolerant tag-level HTML scanning. No DOM: pages in the wild are too
// broken for strict parsing, so this walks tags with a quote-aware
// attribute lexer and leaves everything else alone.

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace neardup::htmlscan {

struct Tag {
  std::string name;  // lowercased
  bool closing = false;
  std::vector<std::pair<std::string, std::string>> attrs;  // names lowercased
  // Raw text content for container tags captured by walk() (script only).
  std::string_view body;
};

std::string to_lower(std::string_view s);

// Case-insensitive substring search.
size_t ifind(std::string_view haystack, std::string_view needle,
             size_t from = 0);

// Calls fn for every tag. Comments are skipped; a <script> tag receives its
// raw body in tag.body (scanning resumes after </script>).
void walk(std::string_view html, const std::function<void(const Tag&)>& fn);

// Attribute value by (lowercased) name, or empty.
std::string_view attr(const Tag& tag, std::string_view name);

// Text outside of tags, with script/style/title bodies excluded and
// whitespace collapsed.
std::string visible_text(std::string_view html);

// Raw inner text of the first <title> element, trimmed.
std::string title_text(std::string_view html);

// Inner text of every <a> element (tags inside stripped).
std::vector<std::string> anchor_texts(std::string_view html);

}  // namespace neardup::htmlscan
