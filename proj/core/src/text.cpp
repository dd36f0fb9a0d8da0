#include "montage/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cctype>


namespace montage {

namespace {

icu::UnicodeString nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  const icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  if (U_FAILURE(status)) return input;
  icu::UnicodeString out = normalizer->normalize(input, status);
  if (U_FAILURE(status)) return input;
  return out;
}

icu::UnicodeString collapse_whitespace(const icu::UnicodeString& in) {
  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < in.length();) {
    const UChar32 c = in.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (pending_space) {
      out.append(static_cast<UChar>(u' '));
      pending_space = false;
    }
    out.append(c);
  }
  return out;
}

std::string to_utf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

bool is_trailing_punct(UChar32 c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '"': case '\'': case 0x201C: case 0x201D: case 0x2018: case 0x2019:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string normalize_text(std::string_view text) {
  return to_utf8(collapse_whitespace(nfc(text)));
}

std::string match_key(std::string_view text) {
  icu::UnicodeString s = collapse_whitespace(nfc(text));
  s.foldCase();
  int32_t start = 0, end = s.length();
  while (end > start && is_trailing_punct(s.char32At(end - 1))) --end;
  while (start < end && (s.charAt(start) == u'"' || s.charAt(start) == u'\'' ||
                         s.charAt(start) == 0x201C || s.charAt(start) == 0x2018))
    ++start;
  icu::UnicodeString core = collapse_whitespace(s.tempSubStringBetween(start, end));
  return to_utf8(core);
}

std::set<std::string> token_set(std::string_view text) {
  icu::UnicodeString s = nfc(text);
  s.foldCase();
  std::set<std::string> tokens;
  icu::UnicodeString current;
  for (int32_t i = 0; i < s.length();) {
    const UChar32 c = s.char32At(i);
    i += U16_LENGTH(c);
    if (u_isalnum(c)) {
      current.append(c);
    } else if (!current.isEmpty()) {
      tokens.insert(to_utf8(current));
      current.remove();
    }
  }
  if (!current.isEmpty()) tokens.insert(to_utf8(current));
  return tokens;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t shared = 0;
  for (const auto& t : a) shared += b.count(t);
  const std::size_t uni = a.size() + b.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(uni);
}

std::string_view trim(std::string_view text) noexcept {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace montage
