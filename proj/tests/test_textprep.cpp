#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <string>
#include <vector>

#include "altc/error.hpp"
#include "altc/textprep.hpp"

namespace altc {
namespace {

// ASCII-only reimplementation of the pipeline as a plain character walk.
std::string ascii_oracle(const std::string& in) {
  const auto alnum = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  };
  const auto word = [&](char c) { return alnum(c) || c == '_'; };
  const auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n'; };
  const auto prefix_ci = [](const std::string& s, std::size_t at, const char* p) {
    for (std::size_t k = 0; p[k] != '\0'; ++k) {
      if (at + k >= s.size()) return false;
      char c = s[at + k];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      if (c != p[k]) return false;
    }
    return true;
  };

  std::string a;
  for (std::size_t i = 0; i < in.size();) {
    const bool start = i == 0 || !alnum(in[i - 1]);
    if (start && (prefix_ci(in, i, "http://") || prefix_ci(in, i, "https://") ||
                  prefix_ci(in, i, "www."))) {
      while (i < in.size() && !space(in[i])) ++i;
      a += ' ';
    } else {
      a += in[i++];
    }
  }
  std::string b;
  for (std::size_t i = 0; i < a.size();) {
    if (a[i] == '@' && (i == 0 || !word(a[i - 1])) && i + 1 < a.size() && word(a[i + 1])) {
      ++i;
      while (i < a.size() && word(a[i])) ++i;
      b += ' ';
    } else {
      b += a[i++];
    }
  }
  std::string c;
  for (const char ch : b) {
    if (ch >= '0' && ch <= '9') continue;
    if (space(ch)) {
      c += ' ';
    } else if ((ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z')) {
      c += (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch;
    } else {
      c += ' ';
    }
  }
  std::string out;
  for (const char ch : c) {
    if (ch == ' ') {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += ch;
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

TEST_CASE("Normalize.MixedTweetReducesToWords") {
  CHECK_EQ(normalize("Check @user https://t.co/x THIS 123!"), "check this");
}

TEST_CASE("Normalize.EmptyAndFixedPoint") {
  CHECK_EQ(normalize(""), "");
  CHECK_EQ(normalize("hope"), "hope");
}

TEST_CASE("Normalize.MatchesCharacterWalkOracleOnRandomAscii") {
  const std::string alphabet = "aBcZ09 _@:/.!#\t\nhtpswHTPW-";
  std::mt19937_64 gen(42);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    const auto len = gen() % 40;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[gen() % alphabet.size()];
    if (trial % 5 == 0) s.insert(gen() % (s.size() + 1), " https://x.y/1 ");
    if (trial % 7 == 0) s.insert(gen() % (s.size() + 1), "www.z9");
    INFO("input: [" << s << "]");
    REQUIRE_EQ(normalize(s), ascii_oracle(s));
  }
}

TEST_CASE("Normalize.UrlsAreRemovedWholeIncludingDigitsAndCase") {
  CHECK_EQ(normalize("see HTTPS://Example.com/a1?b=2 now"), "see now");
  CHECK_EQ(normalize("go www.site.org/x"), "go");
  // Not at a token start, so not a URL.
  CHECK_EQ(normalize("xhttp://y"), "xhttp y");
}

TEST_CASE("Normalize.MentionNeedsTokenStartAndWordCharacter") {
  CHECK_EQ(normalize("hi @bob_99 there"), "hi there");
  CHECK_EQ(normalize("mail a@b.com"), "mail a b com");
  CHECK_EQ(normalize("lone @ sign"), "lone sign");
}

TEST_CASE("Normalize.HashtagsKeepTheirWord") { CHECK_EQ(normalize("#Hope wins"), "hope wins"); }

TEST_CASE("Normalize.DigitsVanishWithoutSplittingWords") { CHECK_EQ(normalize("covid19 r2d2"), "covid rd"); }

TEST_CASE("Normalize.UnicodeLettersAndSimpleCaseFolding") {
  CHECK_EQ(normalize("ÄRGER über Straße"), "ärger über straße");
  CHECK_EQ(normalize("¡Esperanza, AMIGOS!"), "esperanza amigos");
  // Arabic-Indic digits are decimal digits too.
  CHECK_EQ(normalize("امید ٣ ہے"), "امید ہے");
}

TEST_CASE("Normalize.CombiningMarksStayWithTheirLetters") {
  // "e" + COMBINING ACUTE ACCENT
  CHECK_EQ(normalize("Cafe\xCC\x81!"), "cafe\xCC\x81");
}

TEST_CASE("Normalize.FlagsCanBeDisabled") {
  PrepConfig cfg;
  cfg.lowercase = false;
  cfg.strip_digits = false;
  cfg.strip_special = false;
  cfg.strip_mentions = false;
  cfg.strip_urls = false;
  CHECK_EQ(normalize("  Hi  @Bob 42!  ", cfg), "Hi @Bob 42!");
  cfg.strip_mentions = true;
  CHECK_EQ(normalize("Hi @Bob 42!", cfg), "Hi 42!");
}

TEST_CASE("Normalize.InvalidUtf8BecomesReplacementThenSpace") {
  CHECK_EQ(normalize(std::string("ab\xFF" "cd")), "ab cd");
}

TEST_CASE("Normalize.IsIdempotent") {
  const std::vector<std::string> samples = {
      "Check @user https://t.co/x THIS 123!", "ÄRGER über Straße", "a@@b @@c", "امید ہے ٣",
      "x\t\ty\n\nz", "www.www.www", "@_ _@ __", "Ǆ ǅ ǆ ß ẞ", "🙂 hope 🙂", "http://"};
  std::mt19937_64 gen(7);
  std::vector<std::string> all = samples;
  const std::vector<std::string> pieces = {"a", "Ä", "@", "_", " ", "1", "٣", "http://", "www.",
                                           "ß", "#", "é", "\xCC\x81", "\t", "ہ", "!"};
  for (int i = 0; i < 500; ++i) {
    std::string s;
    for (int j = 0; j < 12; ++j) s += pieces[gen() % pieces.size()];
    all.push_back(s);
  }
  for (const auto& s : all) {
    const auto once = normalize(s);
    INFO(s);
    CHECK_EQ(normalize(once), once);
  }
}

TEST_CASE("Tokenize.SplitsNormalizedText") {
  CHECK_EQ(tokenize("check this"), (std::vector<std::string>{"check", "this"}));
  CHECK(tokenize("").empty());
}

TEST_CASE("Tokenize.UrduPhraseGivesTwoWords") {
  // "امید ہے" ("there is hope"): a space separates two Arabic-script words.
  const auto tokens = tokenize("امید ہے");
  REQUIRE_EQ(tokens.size(), 2u);
  CHECK_EQ(tokens[0], "امید");
  CHECK_EQ(tokens[1], "ہے");
}

TEST_CASE("Tokenize.WhitespaceModeKeepsPunctuationTokens") {
  PrepConfig cfg;
  cfg.tokenizer = TokenizerKind::Whitespace;
  CHECK_EQ(tokenize(" a  b,c\td ", cfg), (std::vector<std::string>{"a", "b,c", "d"}));
}

TEST_CASE("Tokenize.WordModeDropsPunctuationSegments") {
  CHECK_EQ(tokenize("a, b!"), (std::vector<std::string>{"a", "b"}));
}

TEST_CASE("Tokenize.RejoinRoundTripAndNoEmptyOrSpacedTokens") {
  const std::vector<std::string> texts = {"check this", "ärger über straße", "امید ہے",
                                          "esperanza amigos", "a b c d e"};
  for (const auto kind : {TokenizerKind::UnicodeWords, TokenizerKind::Whitespace}) {
    PrepConfig cfg;
    cfg.tokenizer = kind;
    for (const auto& t : texts) {
      const auto tokens = tokenize(normalize(t), cfg);
      std::string joined;
      for (const auto& tok : tokens) {
        CHECK_FALSE(tok.empty());
        CHECK_EQ(tok.find_first_of(" \t\n"), std::string::npos);
        if (!joined.empty()) joined += ' ';
        joined += tok;
      }
      CHECK_EQ(tokenize(joined, cfg), tokens);
    }
  }
}

TEST_CASE("Tokenizer.NamesRoundTrip") {
  CHECK_EQ(parse_tokenizer(to_string(TokenizerKind::Whitespace)), TokenizerKind::Whitespace);
  CHECK_EQ(parse_tokenizer(to_string(TokenizerKind::UnicodeWords)), TokenizerKind::UnicodeWords);
  CHECK_THROWS_AS(parse_tokenizer("bpe"), Error);
}

}  // namespace
}  // namespace altc
