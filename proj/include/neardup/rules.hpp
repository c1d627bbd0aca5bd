#pragma once

#include <filesystem>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace neardup {

struct AnnotationRule {
  std::string name;  // doubles as the reserved word emitted on a match
  int priority = 100;  // lower fires first
  // With Both, every non-empty context regex must match. With Either, at
  // least one non-empty context regex must match (still all-of when only
  // one is given).
  enum class Context { Both, Either } context = Context::Both;
  std::string pre;     // searched against the common text before the change
  std::string target;  // must fully match each present side
  std::string post;    // searched against the common text after the change
  bool enabled = true;

  std::optional<std::regex> pre_rx, target_rx, post_rx;
};

struct RuleParseError : std::runtime_error {
  RuleParseError(const std::string& what, std::string rule, size_t line_)
      : std::runtime_error(what), rule_name(std::move(rule)), line(line_) {}
  std::string rule_name;
  size_t line;
};

struct RuleSet {
  // Sorted by (priority, name); ties broken by name for determinism.
  std::vector<AnnotationRule> rules;
};

// The ten built-in rules (nine live categories plus the disabled failure
// placeholder), parsed from the embedded rule file text.
RuleSet default_rules();

// Text of the embedded rule file, suitable for dumping and editing.
std::string default_rules_text();

// Parses rule records and merges them over the defaults by name. Unknown
// keys, bad priorities, and regexes that fail to compile are rejected with
// the rule name and line number.
RuleSet load_rules(std::string_view text);
RuleSet load_rules_file(const std::filesystem::path& path);

std::string dump_rules(const RuleSet& rules);

}  // namespace neardup
