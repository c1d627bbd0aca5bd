#include "neardup/rules.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace neardup {

namespace {

constexpr const char* kDefaultRulesText = R"RULES(# Annotation rules.
#
# Records start with [rule]. Fields: name, priority, context (both|either),
# pre, target, post, enabled. Regexes are ECMAScript; values are trimmed, so
# write boundary whitespace as \s or [ ]. target must fully match the deleted
# text and the inserted text (each side that is present). pre is searched
# against the common text immediately before the change (anchor with $), post
# against the common text after it (anchor with ^). With context = both every
# given context regex must match; with context = either one suffices. Lower
# priority fires first; the first matching rule replaces both sides of the
# change with its name as a reserved word.

[rule]
# Payment addresses linked through explorer URL paths or URI schemes. The
# address itself is random-looking, so the surrounding path is the signal.
name = bitcoin
priority = 10
context = both
pre = (/address/|address=|bitcoin:)\s*$
target = [13][1-9A-HJ-NP-Za-km-z]{24,33}|bc1[qpzry9x8gf2tvdw0s3jn54khce6mua7l]{11,71}

[rule]
# Amounts adjacent to a currency marker on either side: integers, decimals,
# comma-grouped thousands, optional sign.
name = price
priority = 20
context = either
pre = (BTC|XMR|ETH|LTC|USDT?|EUR|RUB|GBP|\$|€|₽|£|¥)\s*[:=]?\s*$
target = [-+]?\d{1,3}(,\d{3})+(\.\d+)?|[-+]?\d+(\.\d+)?
post = ^\s*(BTC|XMR|ETH|LTC|USDT?|EUR|RUB|GBP|\$|€|₽|£|¥)

[rule]
# Dates carry their shape with them, so no context is required: numeric
# dates plus month-name forms on either side of the day number.
name = date
priority = 30
target = (\d{1,4}[./-]){2}\d{1,4}|\d{1,2}[./ -]?([Jj]an(uary)?|[Ff]eb(ruary)?|[Mm]ar(ch)?|[Aa]pr(il)?|[Mm]ay|[Jj]une?|[Jj]uly?|[Aa]ug(ust)?|[Ss]ep(t(ember)?)?|[Oo]ct(ober)?|[Nn]ov(ember)?|[Dd]ec(ember)?)|([Jj]an(uary)?|[Ff]eb(ruary)?|[Mm]ar(ch)?|[Aa]pr(il)?|[Mm]ay|[Jj]une?|[Jj]uly?|[Aa]ug(ust)?|[Ss]ep(t(ember)?)?|[Oo]ct(ober)?|[Nn]ov(ember)?|[Dd]ec(ember)?)[./ -]?\d{1,4}

[rule]
# Live counters advertised next to a word from the counter vocabulary.
name = ad
priority = 40
context = either
pre = ([Uu]sers|[Oo]rders|[Mm]embers|[Oo]nline|[Vv]isitors|[Tt]ransactions|[Ss]ales|[Vv]endors|[Rr]eviews)\s*[:=]?\s*$
target = \d{1,3}(,\d{3})+|\d+
post = ^\s*([Cc]ompleted [Oo]rders|[Uu]sers|[Oo]rders|[Mm]embers|[Oo]nline|[Vv]isitors|[Tt]ransactions|[Ss]ales|[Vv]endors|[Rr]eviews)

[rule]
# Whitespace-only churn.
name = space
priority = 50
target = \s+

[rule]
# Hidden-service hostnames bracketed by the scheme and the .onion suffix;
# 16-char legacy and 56-char current forms.
name = onion
priority = 60
context = both
pre = [Hh]ttps?://$
target = [a-z2-7]{56}|[a-z2-7]{16}
post = ^\.onion

[rule]
# Relative ages such as "8 days"; the unit travels inside the change.
name = time
priority = 70
target = \d+\s*([Ss]econds?|[Mm]inutes?|[Hh]ours?|[Dd]ays?|[Ww]eeks?|[Mm]onths?|[Yy]ears?|[Ss]ecs?|[Mm]ins?|[Hh]rs?)

[rule]
# Rotating media file names: anything directly followed by an image
# extension in the common text.
name = image
priority = 80
context = both
target = [\s\S]+
post = ^\.(png|jpe?g|gif|webp|bmp|svg|ico)\b

[rule]
# One-sided changes (pure insertion or deletion) that matched nothing above
# collapse to a shared placeholder so both sides stay comparable. Built-in
# behavior: fires only when exactly one side is present.
name = empty
priority = 90

[rule]
# Placeholder documenting the failure bucket: changes no enabled rule
# matches keep their literal text and are tallied under this name.
name = fail
priority = 1000
enabled = false
)RULES";

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
    --e;
  return std::string(s.substr(b, e - b));
}

void compile_rule(AnnotationRule& rule, size_t line) {
  const auto compile = [&](const std::string& src, const char* field) {
    std::optional<std::regex> rx;
    if (src.empty()) return rx;
    try {
      rx.emplace(src, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw RuleParseError("rule '" + rule.name + "': bad " + field +
                               " regex: " + e.what(),
                           rule.name, line);
    }
    return rx;
  };
  rule.pre_rx = compile(rule.pre, "pre");
  rule.target_rx = compile(rule.target, "target");
  rule.post_rx = compile(rule.post, "post");
}

std::vector<AnnotationRule> parse_records(std::string_view text) {
  std::vector<AnnotationRule> records;
  std::optional<AnnotationRule> current;
  size_t record_line = 0;

  size_t line_no = 0;
  size_t pos = 0;
  const auto flush = [&]() {
    if (!current) return;
    if (current->name.empty()) {
      throw RuleParseError("rule record has no name", "", record_line);
    }
    compile_rule(*current, record_line);
    records.push_back(std::move(*current));
    current.reset();
  };
  while (pos <= text.size()) {
    const size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string line = trim(text.substr(pos, eol - pos));
    ++line_no;
    pos = eol + 1;
    if (line.empty() || line[0] == '#') {
      if (eol == text.size()) break;
      continue;
    }
    if (line == "[rule]") {
      flush();
      current.emplace();
      current->pre.clear();
      current->target.clear();
      current->post.clear();
      record_line = line_no;
      if (eol == text.size()) break;
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos || !current) {
      throw RuleParseError("expected 'key = value' inside a [rule] record",
                           current ? current->name : "", line_no);
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "name") {
      current->name = value;
    } else if (key == "priority") {
      try {
        current->priority = std::stoi(value);
      } catch (const std::exception&) {
        throw RuleParseError("rule '" + current->name + "': bad priority '" +
                                 value + "'",
                             current->name, line_no);
      }
    } else if (key == "context") {
      if (value == "both") {
        current->context = AnnotationRule::Context::Both;
      } else if (value == "either") {
        current->context = AnnotationRule::Context::Either;
      } else {
        throw RuleParseError("rule '" + current->name +
                                 "': context must be both or either",
                             current->name, line_no);
      }
    } else if (key == "pre") {
      current->pre = value;
    } else if (key == "target") {
      current->target = value;
    } else if (key == "post") {
      current->post = value;
    } else if (key == "enabled") {
      if (value == "true") {
        current->enabled = true;
      } else if (value == "false") {
        current->enabled = false;
      } else {
        throw RuleParseError("rule '" + current->name +
                                 "': enabled must be true or false",
                             current->name, line_no);
      }
    } else {
      throw RuleParseError(
          "rule '" + current->name + "': unknown key '" + key + "'",
          current->name, line_no);
    }
    if (eol == text.size()) break;
  }
  flush();
  return records;
}

RuleSet finalize(std::vector<AnnotationRule> rules) {
  std::sort(rules.begin(), rules.end(),
            [](const AnnotationRule& a, const AnnotationRule& b) {
              return std::tie(a.priority, a.name) < std::tie(b.priority, b.name);
            });
  for (size_t i = 1; i < rules.size(); ++i) {
    if (rules[i].priority == rules[i - 1].priority) {
      throw RuleParseError("rules '" + rules[i - 1].name + "' and '" +
                               rules[i].name + "' share priority " +
                               std::to_string(rules[i].priority),
                           rules[i].name, 0);
    }
  }
  return RuleSet{std::move(rules)};
}

}  // namespace

std::string default_rules_text() { return kDefaultRulesText; }

RuleSet default_rules() { return finalize(parse_records(kDefaultRulesText)); }

RuleSet load_rules(std::string_view text) {
  std::vector<AnnotationRule> merged = parse_records(kDefaultRulesText);
  for (auto& record : parse_records(text)) {
    const auto it = std::find_if(
        merged.begin(), merged.end(),
        [&](const AnnotationRule& r) { return r.name == record.name; });
    if (it != merged.end()) {
      *it = std::move(record);
    } else {
      merged.push_back(std::move(record));
    }
  }
  return finalize(std::move(merged));
}

RuleSet load_rules_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw RuleParseError("cannot open rule file: " + path.string(), "", 0);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_rules(buf.str());
}

std::string dump_rules(const RuleSet& rules) {
  std::ostringstream out;
  out << "# Annotation rules (normalized dump).\n";
  for (const auto& r : rules.rules) {
    out << "\n[rule]\n";
    out << "name = " << r.name << "\n";
    out << "priority = " << r.priority << "\n";
    if (r.context == AnnotationRule::Context::Either)
      out << "context = either\n";
    if (!r.pre.empty()) out << "pre = " << r.pre << "\n";
    if (!r.target.empty()) out << "target = " << r.target << "\n";
    if (!r.post.empty()) out << "post = " << r.post << "\n";
    if (!r.enabled) out << "enabled = false\n";
  }
  return out.str();
}

}  // namespace neardup
