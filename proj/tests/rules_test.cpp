#include "doctest.h"

#include "neardup/rules.hpp"

#include <algorithm>
#include <string>
#include <vector>

using namespace neardup;

namespace {

const AnnotationRule* find(const RuleSet& set, const std::string& name) {
    for (const auto& r : set.rules)
        if (r.name == name) return &r;
    return nullptr;
}

} // namespace

TEST_CASE("default rule set ships the ten built-in categories") {
    auto set = default_rules();
    REQUIRE(set.rules.size() == 10);

    std::vector<std::string> names;
    for (const auto& r : set.rules) names.push_back(r.name);
    CHECK(names == std::vector<std::string>{"bitcoin", "price", "date", "ad", "space",
                                            "onion", "time", "image", "empty", "fail"});

    // Sorted by priority, strictly increasing.
    for (size_t i = 1; i < set.rules.size(); ++i)
        CHECK(set.rules[i - 1].priority < set.rules[i].priority);

    CHECK(find(set, "bitcoin")->priority == 10);
    CHECK(find(set, "space")->target == "\\s+");
    CHECK(find(set, "fail")->enabled == false);
    CHECK(find(set, "empty")->target.empty());
    CHECK(find(set, "price")->context == AnnotationRule::Context::Either);
    CHECK(find(set, "bitcoin")->context == AnnotationRule::Context::Both);
}

TEST_CASE("rule records merge over the defaults by name") {
    auto set = load_rules(
        "[rule]\n"
        "name = price\n"
        "priority = 15\n"
        "target = \\d+\n"
        "\n"
        "[rule]\n"
        "name = serial\n"
        "priority = 95\n"
        "pre = serial\\s*#\\s*$\n"
        "target = [A-Z0-9]{8}\n");
    REQUIRE(set.rules.size() == 11);

    const auto* price = find(set, "price");
    REQUIRE(price);
    CHECK(price->priority == 15);
    CHECK(price->target == "\\d+");
    CHECK(price->pre.empty());  // replaced wholesale, not patched

    const auto* serial = find(set, "serial");
    REQUIRE(serial);
    CHECK(serial->priority == 95);

    // Untouched defaults survive.
    CHECK(find(set, "date")->priority == 30);
}

TEST_CASE("a rule can be disabled without being removed") {
    auto set = load_rules(
        "[rule]\n"
        "name = space\n"
        "priority = 50\n"
        "target = \\s+\n"
        "enabled = false\n");
    const auto* space = find(set, "space");
    REQUIRE(space);
    CHECK_FALSE(space->enabled);
}

TEST_CASE("empty overlay text returns the defaults") {
    auto defaults = default_rules();
    auto loaded = load_rules("");
    REQUIRE(loaded.rules.size() == defaults.rules.size());
    for (size_t i = 0; i < loaded.rules.size(); ++i) {
        CHECK(loaded.rules[i].name == defaults.rules[i].name);
        CHECK(loaded.rules[i].priority == defaults.rules[i].priority);
        CHECK(loaded.rules[i].target == defaults.rules[i].target);
    }
}

TEST_CASE("malformed rule records are rejected with name and line") {
    // Record without a name.
    try {
        load_rules("[rule]\npriority = 5\ntarget = x\n");
        FAIL("expected RuleParseError");
    } catch (const RuleParseError& e) {
        CHECK(e.line == 1);
    }

    // Regex that does not compile names the rule.
    try {
        load_rules("[rule]\nname = broken\npriority = 7\ntarget = [unclosed\n");
        FAIL("expected RuleParseError");
    } catch (const RuleParseError& e) {
        CHECK(e.rule_name == "broken");
        CHECK(std::string(e.what()).find("broken") != std::string::npos);
    }

    // Unknown key.
    try {
        load_rules("[rule]\nname = odd\nflavor = vanilla\n");
        FAIL("expected RuleParseError");
    } catch (const RuleParseError& e) {
        CHECK(e.rule_name == "odd");
        CHECK(e.line == 3);
    }

    // Bad priority value.
    CHECK_THROWS_AS(load_rules("[rule]\nname = p\npriority = high\ntarget = x\n"),
                    RuleParseError);
    // Bad context value.
    CHECK_THROWS_AS(load_rules("[rule]\nname = c\ncontext = sometimes\ntarget = x\n"),
                    RuleParseError);
    // Key outside any record.
    CHECK_THROWS_AS(load_rules("name = stray\n"), RuleParseError);
}

TEST_CASE("duplicate priorities are rejected") {
    try {
        load_rules(
            "[rule]\nname = clash\npriority = 20\ntarget = x\n");  // price is 20
        FAIL("expected RuleParseError");
    } catch (const RuleParseError& e) {
        CHECK(std::string(e.what()).find("20") != std::string::npos);
    }
}

TEST_CASE("dumping and reloading rules is lossless") {
    auto defaults = default_rules();
    auto dumped = dump_rules(defaults);
    auto reloaded = load_rules(dumped);
    REQUIRE(reloaded.rules.size() == defaults.rules.size());
    for (size_t i = 0; i < defaults.rules.size(); ++i) {
        const auto& a = defaults.rules[i];
        const auto& b = reloaded.rules[i];
        CHECK(a.name == b.name);
        CHECK(a.priority == b.priority);
        CHECK(a.context == b.context);
        CHECK(a.pre == b.pre);
        CHECK(a.target == b.target);
        CHECK(a.post == b.post);
        CHECK(a.enabled == b.enabled);
    }
}

TEST_CASE("comments and blank lines are ignored") {
    auto set = load_rules("# just a comment\n\n# another\n");
    CHECK(set.rules.size() == default_rules().rules.size());
}
