#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace altc {

enum class TokenizerKind { UnicodeWords, Whitespace };

std::string_view to_string(TokenizerKind kind) noexcept;
TokenizerKind parse_tokenizer(std::string_view name);

struct PrepConfig {
  bool lowercase = true;
  bool strip_mentions = true;
  bool strip_urls = true;
  bool strip_digits = true;
  // Anything that is neither a letter, a combining mark, nor whitespace.
  bool strip_special = true;
  TokenizerKind tokenizer = TokenizerKind::UnicodeWords;

  friend bool operator==(const PrepConfig&, const PrepConfig&) = default;
};

// URL removal, mention removal, digit removal, special-character removal
// (each special character becomes a space), simple case folding; then
// whitespace runs collapse to one space and the ends are trimmed.
// Invalid UTF-8 sequences are treated as U+FFFD.
std::string normalize(std::string_view text, const PrepConfig& cfg = {});

// Splits normalized text into non-empty tokens. UnicodeWords follows the
// Unicode word-boundary rules and keeps only word-like segments.
std::vector<std::string> tokenize(std::string_view text, const PrepConfig& cfg = {});

// tokenize(normalize(text)).
std::vector<std::string> preprocess(std::string_view text, const PrepConfig& cfg = {});

}  // namespace altc
