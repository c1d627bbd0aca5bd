#include "html_scan.hpp"

#include <cctype>

namespace neardup::htmlscan {

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

size_t ifind(std::string_view haystack, std::string_view needle, size_t from) {
  if (needle.empty()) return from <= haystack.size() ? from : std::string_view::npos;
  if (needle.size() > haystack.size()) return std::string_view::npos;
  auto lower = [](char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  };
  for (size_t i = from; i + needle.size() <= haystack.size(); ++i) {
    size_t j = 0;
    while (j < needle.size() && lower(haystack[i + j]) == lower(needle[j])) ++j;
    if (j == needle.size()) return i;
  }
  return std::string_view::npos;
}

namespace {

bool is_name_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '-' || c == '_' || c == ':';
}

// Parses one tag starting at html[pos] == '<'. Returns the index just past
// the closing '>', or npos if the tag never closes (scan then abandons it).
size_t parse_tag(std::string_view html, size_t pos, Tag& tag) {
  size_t i = pos + 1;
  tag.closing = false;
  tag.attrs.clear();
  tag.body = {};
  if (i < html.size() && html[i] == '/') {
    tag.closing = true;
    ++i;
  }
  size_t name_start = i;
  while (i < html.size() && is_name_char(html[i])) ++i;
  tag.name = to_lower(html.substr(name_start, i - name_start));

  while (i < html.size() && html[i] != '>') {
    unsigned char u = static_cast<unsigned char>(html[i]);
    if (std::isspace(u) || html[i] == '/') {
      ++i;
      continue;
    }
    // Attribute name.
    size_t a = i;
    while (i < html.size() && html[i] != '=' && html[i] != '>' &&
           html[i] != '/' && !std::isspace(static_cast<unsigned char>(html[i])))
      ++i;
    std::string aname = to_lower(html.substr(a, i - a));
    while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i])))
      ++i;
    std::string aval;
    if (i < html.size() && html[i] == '=') {
      ++i;
      while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i])))
        ++i;
      if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
        char q = html[i++];
        size_t v = i;
        while (i < html.size() && html[i] != q) ++i;
        aval.assign(html.substr(v, i - v));
        if (i < html.size()) ++i;  // past quote
      } else {
        size_t v = i;
        while (i < html.size() && html[i] != '>' &&
               !std::isspace(static_cast<unsigned char>(html[i])))
          ++i;
        aval.assign(html.substr(v, i - v));
      }
    }
    if (!aname.empty()) tag.attrs.emplace_back(std::move(aname), std::move(aval));
  }
  if (i >= html.size()) return std::string_view::npos;
  return i + 1;  // past '>'
}

}  // namespace

void walk(std::string_view html, const std::function<void(const Tag&)>& fn) {
  Tag tag;
  size_t i = 0;
  while (i < html.size()) {
    size_t lt = html.find('<', i);
    if (lt == std::string_view::npos) return;
    if (html.compare(lt, 4, "<!--") == 0) {
      size_t end = html.find("-->", lt + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    if (lt + 1 < html.size() &&
        !(is_name_char(html[lt + 1]) || html[lt + 1] == '/' ||
          html[lt + 1] == '!')) {
      i = lt + 1;  // stray '<'
      continue;
    }
    size_t after = parse_tag(html, lt, tag);
    if (after == std::string_view::npos) return;
    if (!tag.closing && tag.name == "script") {
      size_t close = ifind(html, "</script", after);
      size_t body_end = close == std::string_view::npos ? html.size() : close;
      tag.body = html.substr(after, body_end - after);
      fn(tag);
      if (close == std::string_view::npos) return;
      size_t gt = html.find('>', close);
      i = gt == std::string_view::npos ? html.size() : gt + 1;
      continue;
    }
    fn(tag);
    i = after;
  }
}

std::string_view attr(const Tag& tag, std::string_view name) {
  for (const auto& [k, v] : tag.attrs)
    if (k == name) return v;
  return {};
}

std::string visible_text(std::string_view html) {
  std::string out;
  size_t i = 0;
  int skip_depth = 0;          // inside style/title (script handled by body skip)
  std::string skip_name;
  while (i < html.size()) {
    size_t lt = html.find('<', i);
    size_t text_end = lt == std::string_view::npos ? html.size() : lt;
    if (skip_depth == 0) {
      for (size_t j = i; j < text_end; ++j) {
        unsigned char u = static_cast<unsigned char>(html[j]);
        if (std::isspace(u)) {
          if (!out.empty() && out.back() != ' ') out.push_back(' ');
        } else {
          out.push_back(html[j]);
        }
      }
    }
    if (lt == std::string_view::npos) break;
    if (html.compare(lt, 4, "<!--") == 0) {
      size_t end = html.find("-->", lt + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    Tag tag;
    size_t after = parse_tag(html, lt, tag);
    if (after == std::string_view::npos) break;
    if (tag.name == "script" && !tag.closing) {
      size_t close = ifind(html, "</script", after);
      if (close == std::string_view::npos) break;
      size_t gt = html.find('>', close);
      i = gt == std::string_view::npos ? html.size() : gt + 1;
      continue;
    }
    if (tag.name == "style" || tag.name == "title") {
      if (!tag.closing) {
        if (skip_depth == 0) skip_name = tag.name;
        if (tag.name == skip_name) ++skip_depth;
      } else if (skip_depth > 0 && tag.name == skip_name) {
        --skip_depth;
      }
    }
    i = after;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string title_text(std::string_view html) {
  size_t open = ifind(html, "<title");
  if (open == std::string_view::npos) return {};
  size_t gt = html.find('>', open);
  if (gt == std::string_view::npos) return {};
  size_t close = ifind(html, "</title", gt + 1);
  size_t end = close == std::string_view::npos ? html.size() : close;
  std::string_view raw = html.substr(gt + 1, end - gt - 1);
  // Collapse whitespace and trim.
  std::string out;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> anchor_texts(std::string_view html) {
  std::vector<std::string> out;
  size_t i = 0;
  while (true) {
    size_t open = ifind(html, "<a", i);
    // Require a real anchor tag, not <abbr> etc.
    while (open != std::string_view::npos && open + 2 < html.size() &&
           is_name_char(html[open + 2]))
      open = ifind(html, "<a", open + 1);
    if (open == std::string_view::npos) break;
    size_t gt = html.find('>', open);
    if (gt == std::string_view::npos) break;
    size_t close = ifind(html, "</a", gt + 1);
    size_t end = close == std::string_view::npos ? html.size() : close;
    out.push_back(visible_text(html.substr(gt + 1, end - gt - 1)));
    if (close == std::string_view::npos) break;
    i = close + 3;
  }
  return out;
}

}  // namespace neardup::htmlscan
