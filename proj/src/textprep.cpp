#include "altc/textprep.hpp"

#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <memory>

#include "altc/error.hpp"

namespace altc {
namespace {

using CodePoints = std::vector<UChar32>;

CodePoints decode(std::string_view text) {
  CodePoints out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? 0xFFFD : c);
  }
  return out;
}

std::string encode(const CodePoints& cps) {
  std::string out;
  out.reserve(cps.size());
  for (const UChar32 c : cps) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, c);
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
  }
  return out;
}

bool is_letter(UChar32 c) { return (U_GET_GC_MASK(c) & U_GC_L_MASK) != 0; }
bool is_mark(UChar32 c) { return (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0; }
bool is_digit(UChar32 c) { return u_charType(c) == U_DECIMAL_DIGIT_NUMBER; }
bool is_space(UChar32 c) { return u_isUWhiteSpace(c); }
bool is_alnum(UChar32 c) { return is_letter(c) || is_mark(c) || is_digit(c); }
bool is_word_char(UChar32 c) { return is_alnum(c) || c == '_'; }

UChar32 ascii_lower(UChar32 c) { return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c; }

bool starts_with_ascii_ci(const CodePoints& cps, std::size_t at, std::string_view prefix) {
  if (cps.size() - at < prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (ascii_lower(cps[at + k]) != static_cast<UChar32>(prefix[k])) return false;
  }
  return true;
}

bool at_token_start(const CodePoints& cps, std::size_t i) {
  return i == 0 || !is_alnum(cps[i - 1]);
}

// Replaces every http://, https:// or www. run (up to the next whitespace) by a space.
CodePoints remove_urls(const CodePoints& in) {
  CodePoints out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (at_token_start(in, i) && (starts_with_ascii_ci(in, i, "http://") ||
                                  starts_with_ascii_ci(in, i, "https://") ||
                                  starts_with_ascii_ci(in, i, "www."))) {
      while (i < in.size() && !is_space(in[i])) ++i;
      out.push_back(' ');
      continue;
    }
    out.push_back(in[i++]);
  }
  return out;
}

// Replaces "@name" by a space when '@' opens a token and is followed by a word character.
CodePoints remove_mentions(const CodePoints& in) {
  CodePoints out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (in[i] == '@' && (i == 0 || !is_word_char(in[i - 1])) && i + 1 < in.size() &&
        is_word_char(in[i + 1])) {
      ++i;
      while (i < in.size() && is_word_char(in[i])) ++i;
      out.push_back(' ');
      continue;
    }
    out.push_back(in[i++]);
  }
  return out;
}

icu::BreakIterator& word_breaker() {
  thread_local std::unique_ptr<icu::BreakIterator> breaker = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> it(
        icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status) || !it) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string("cannot create ICU word break iterator: ") + u_errorName(status));
    }
    return it;
  }();
  return *breaker;
}

}  // namespace

std::string_view to_string(TokenizerKind kind) noexcept {
  return kind == TokenizerKind::Whitespace ? "whitespace" : "unicode_words";
}

TokenizerKind parse_tokenizer(std::string_view name) {
  if (name == "unicode_words") return TokenizerKind::UnicodeWords;
  if (name == "whitespace") return TokenizerKind::Whitespace;
  throw Error(ErrorCode::InvalidArgument, "unknown tokenizer '" + std::string(name) + "'");
}

std::string normalize(std::string_view text, const PrepConfig& cfg) {
  CodePoints cps = decode(text);
  if (cfg.strip_urls) cps = remove_urls(cps);
  if (cfg.strip_mentions) cps = remove_mentions(cps);
  if (cfg.strip_digits) std::erase_if(cps, is_digit);
  if (cfg.strip_special) {
    for (auto& c : cps) {
      if (!is_letter(c) && !is_mark(c) && !is_space(c)) c = ' ';
    }
  }
  if (cfg.lowercase) {
    for (auto& c : cps) c = u_foldCase(c, U_FOLD_CASE_DEFAULT);
  }

  CodePoints out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (const UChar32 c : cps) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return encode(out);
}

std::vector<std::string> tokenize(std::string_view text, const PrepConfig& cfg) {
  std::vector<std::string> tokens;
  if (cfg.tokenizer == TokenizerKind::Whitespace) {
    const CodePoints cps = decode(text);
    CodePoints current;
    for (const UChar32 c : cps) {
      if (is_space(c)) {
        if (!current.empty()) tokens.push_back(encode(current));
        current.clear();
      } else {
        current.push_back(c);
      }
    }
    if (!current.empty()) tokens.push_back(encode(current));
    return tokens;
  }

  const icu::UnicodeString ustr = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::BreakIterator& it = word_breaker();
  it.setText(ustr);
  int32_t start = it.first();
  for (int32_t end = it.next(); end != icu::BreakIterator::DONE; start = end, end = it.next()) {
    if (it.getRuleStatus() < UBRK_WORD_NONE_LIMIT) continue;
    std::string token;
    ustr.tempSubStringBetween(start, end).toUTF8String(token);
    if (!token.empty()) tokens.push_back(std::move(token));
  }
  return tokens;
}

std::vector<std::string> preprocess(std::string_view text, const PrepConfig& cfg) {
  return tokenize(normalize(text, cfg), cfg);
}

}  // namespace altc
