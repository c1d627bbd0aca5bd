#include "neardup/annotate.hpp"

#include <algorithm>

namespace neardup {

namespace {

constexpr char kSentinel = '\x1f';
constexpr size_t kContextWindow = 160;

bool search_window(const std::regex& rx, std::string_view window) {
  return std::regex_search(window.begin(), window.end(), rx);
}

bool full_match(const std::regex& rx, std::string_view text) {
  return std::regex_match(text.begin(), text.end(), rx);
}

bool rule_matches(const AnnotationRule& rule, std::string_view del,
                  std::string_view ins, std::string_view pre,
                  std::string_view post) {
  if (!rule.enabled) return false;
  if (rule.name == "empty") {
    // Built-in: a change with exactly one present side.
    return del.empty() != ins.empty();
  }
  if (del.empty() && ins.empty()) return false;
  if (!rule.target_rx) return false;
  if (!del.empty() && !full_match(*rule.target_rx, del)) return false;
  if (!ins.empty() && !full_match(*rule.target_rx, ins)) return false;
  const bool has_pre = rule.pre_rx.has_value();
  const bool has_post = rule.post_rx.has_value();
  if (!has_pre && !has_post) return true;
  const bool pre_ok = has_pre && search_window(*rule.pre_rx, pre);
  const bool post_ok = has_post && search_window(*rule.post_rx, post);
  if (rule.context == AnnotationRule::Context::Either && has_pre && has_post) {
    return pre_ok || post_ok;
  }
  return (!has_pre || pre_ok) && (!has_post || post_ok);
}

// One annotatable unit: an adjacent delete/insert pair (or a lone side).
struct Unit {
  size_t first_change;
  size_t change_count;  // 1 or 2
  std::string delete_text;
  std::string insert_text;
  bool pseudo;
};

std::string change_text(const Change& c) {
  std::string s;
  for (const auto& t : c.tokens) s += t.text;
  return s;
}

// Common text before a change, walking back over equal spans and pseudo
// pairs (whose text is shared by both sides); stops at real differences.
std::string pre_window(const std::vector<Change>& changes, size_t idx) {
  std::string out;
  for (size_t i = idx; i-- > 0;) {
    const auto& c = changes[i];
    if (c.op == ChangeOp::Equal) {
      out.insert(0, change_text(c));
    } else if (c.pseudo) {
      if (c.op == ChangeOp::Delete) out.insert(0, change_text(c));
    } else {
      break;
    }
    if (out.size() >= kContextWindow) break;
  }
  if (out.size() > kContextWindow)
    out.erase(0, out.size() - kContextWindow);
  return out;
}

std::string post_window(const std::vector<Change>& changes, size_t idx) {
  std::string out;
  for (size_t i = idx; i < changes.size(); ++i) {
    const auto& c = changes[i];
    if (c.op == ChangeOp::Equal) {
      out += change_text(c);
    } else if (c.pseudo) {
      if (c.op == ChangeOp::Delete) out += change_text(c);
    } else {
      break;
    }
    if (out.size() >= kContextWindow) break;
  }
  if (out.size() > kContextWindow) out.resize(kContextWindow);
  return out;
}

}  // namespace

AnnotationOutcome annotate_change(std::string_view delete_text,
                                  std::string_view insert_text,
                                  std::string_view pre_common,
                                  std::string_view post_common,
                                  const RuleSet& rules) {
  for (const auto& rule : rules.rules) {
    if (rule_matches(rule, delete_text, insert_text, pre_common,
                     post_common)) {
      return {true, rule.name};
    }
  }
  return {false, {}};
}

std::pair<AnnotatedTemplate, AnnotatedTemplate> build_templates(
    const AlignedScript& script, const RuleSet& rules) {
  AnnotatedTemplate old_tpl, new_tpl;
  const auto& changes = script.changes;

  const auto add_literal = [](AnnotatedTemplate& tpl, const std::string& s) {
    tpl.display += s;
    tpl.canonical += s;
  };
  const auto add_word = [](AnnotatedTemplate& tpl, const std::string& word) {
    tpl.display += "{" + word + "}";
    tpl.canonical += kSentinel;
    tpl.canonical += word;
    tpl.canonical += kSentinel;
  };

  size_t i = 0;
  while (i < changes.size()) {
    const auto& c = changes[i];
    if (c.op == ChangeOp::Equal) {
      const std::string text = change_text(c);
      add_literal(old_tpl, text);
      add_literal(new_tpl, text);
      ++i;
      continue;
    }
    Unit unit{i, 1, {}, {}, c.pseudo};
    if (c.op == ChangeOp::Delete) {
      unit.delete_text = change_text(c);
      if (i + 1 < changes.size() && changes[i + 1].op == ChangeOp::Insert &&
          changes[i + 1].pseudo == c.pseudo) {
        unit.insert_text = change_text(changes[i + 1]);
        unit.change_count = 2;
      }
    } else {
      unit.insert_text = change_text(c);
    }
    const std::string pre = pre_window(changes, unit.first_change);
    const std::string post =
        post_window(changes, unit.first_change + unit.change_count);
    const AnnotationOutcome outcome = annotate_change(
        unit.delete_text, unit.insert_text, pre, post, rules);
    const std::string label = outcome.annotated ? outcome.word : "fail";
    for (auto* tpl : {&old_tpl, &new_tpl}) {
      tpl->category_counts[label] += 1;
      if (!outcome.annotated) tpl->failures += 1;
      tpl->trace.push_back(
          {label, unit.delete_text, unit.insert_text, unit.pseudo});
    }
    if (outcome.annotated) {
      add_word(old_tpl, outcome.word);
      add_word(new_tpl, outcome.word);
    } else {
      add_literal(old_tpl, unit.delete_text);
      add_literal(new_tpl, unit.insert_text);
    }
    i += unit.change_count;
  }
  return {std::move(old_tpl), std::move(new_tpl)};
}

TemplateDigest template_hash(const AnnotatedTemplate& tpl) {
  return {sha256(tpl.canonical)};
}

TemplateDigest content_digest(std::string_view raw_bytes) {
  return {sha256(raw_bytes)};
}

}  // namespace neardup
