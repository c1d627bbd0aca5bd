#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "neardup/diff.hpp"
#include "neardup/rules.hpp"
#include "neardup/sha256.hpp"

namespace neardup {

struct AnnotationOutcome {
  bool annotated = false;
  std::string word;  // reserved word when annotated
};

// Applies the first enabled rule (by priority) whose target fully matches
// every present side and whose context regexes match the surrounding common
// text. pre_common/post_common are the common text immediately before/after
// the change.
AnnotationOutcome annotate_change(std::string_view delete_text,
                                  std::string_view insert_text,
                                  std::string_view pre_common,
                                  std::string_view post_common,
                                  const RuleSet& rules);

struct AnnotationTraceEntry {
  std::string word;  // reserved word, or "fail"
  std::string delete_text;
  std::string insert_text;
  bool pseudo = false;
};

struct AnnotatedTemplate {
  // Human-readable rendering: reserved words appear as {word}.
  std::string display;
  // Canonical byte rendering hashed for identity: reserved words are
  // wrapped in 0x1f sentinels, which tokenized page text cannot contain.
  std::string canonical;
  std::map<std::string, int> category_counts;
  int failures = 0;
  std::vector<AnnotationTraceEntry> trace;
};

// Renders both sides of a script. Every annotated change contributes the
// same reserved word to both templates; failed changes keep their literal
// side text. Equal spans pass through verbatim.
std::pair<AnnotatedTemplate, AnnotatedTemplate> build_templates(
    const AlignedScript& script, const RuleSet& rules);

struct TemplateDigest {
  Sha256 bytes{};
  static constexpr const char* algorithm = "sha256";

  std::string hex() const { return to_hex(bytes); }
  auto operator<=>(const TemplateDigest&) const = default;
};

TemplateDigest template_hash(const AnnotatedTemplate& tpl);
TemplateDigest content_digest(std::string_view raw_bytes);

}  // namespace neardup
