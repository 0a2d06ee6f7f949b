#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kgrag/text.hpp"

using namespace kgrag;

TEST_CASE("normalize_whitespace collapses runs and trims") {
    CHECK(text::normalize_whitespace("  a\t\tb \n c  ") == "a b c");
    CHECK(text::normalize_whitespace("") == "");
    CHECK(text::normalize_whitespace(" \n\t ") == "");
    CHECK(text::normalize_whitespace("already clean") == "already clean");
}

TEST_CASE("tokenize_ws and count_units") {
    auto toks = text::tokenize_ws(" one  two\tthree ");
    REQUIRE(toks.size() == 3);
    CHECK(toks[0] == "one");
    CHECK(toks[2] == "three");
    CHECK(text::count_units("one two three") == 3);
    CHECK(text::count_units("") == 0);
    CHECK(text::count_units("   ") == 0);
}

TEST_CASE("nfc composes combining sequences") {
    // "e" + U+0301 combining acute -> U+00E9
    std::string decomposed = "caf\x65\xcc\x81";
    std::string composed = "caf\xc3\xa9";
    CHECK(text::nfc(decomposed) == composed);
    CHECK(text::nfc(composed) == composed);
    CHECK(text::nfc("plain") == "plain");
}

TEST_CASE("nfc passes invalid utf-8 through") {
    std::string bad = "ab\xff\xfe";
    CHECK(text::nfc(bad) == bad);
}

TEST_CASE("casefold is a full fold") {
    CHECK(text::casefold("HELLO") == "hello");
    CHECK(text::casefold("MiXeD Case") == "mixed case");
    // Full folding expands sharp s.
    CHECK(text::casefold("Stra\xc3\x9f""e") == "strasse");
}

TEST_CASE("normalize_surface trims, collapses, keeps case") {
    CHECK(text::normalize_surface("  New   York ") == "New York");
    CHECK(text::normalize_surface("Paris") == "Paris");
    std::string once = text::normalize_surface("  A  B  ");
    CHECK(text::normalize_surface(once) == once);
}

TEST_CASE("entity_key equates case variants") {
    CHECK(text::entity_key("New York") == text::entity_key("new york"));
    CHECK(text::entity_key("  NEW   YORK ") == text::entity_key("New York"));
    CHECK(text::entity_key("Paris") != text::entity_key("London"));
}

TEST_CASE("alnum_tokens strips punctuation and lowercases") {
    auto toks = text::alnum_tokens("Hello, World! It's 1891.");
    REQUIRE(toks.size() == 5);
    CHECK(toks[0] == "hello");
    CHECK(toks[1] == "world");
    CHECK(toks[2] == "it");
    CHECK(toks[3] == "s");
    CHECK(toks[4] == "1891");
}

TEST_CASE("answer_tokens drops articles") {
    auto toks = text::answer_tokens("The Miners Guild");
    REQUIRE(toks.size() == 2);
    CHECK(toks[0] == "miners");
    CHECK(toks[1] == "guild");

    CHECK(text::answer_tokens("a an the").empty());
    CHECK(text::answer_tokens("").empty());

    auto mixed = text::answer_tokens("An Apple, a day!");
    REQUIRE(mixed.size() == 2);
    CHECK(mixed[0] == "apple");
    CHECK(mixed[1] == "day");
}
