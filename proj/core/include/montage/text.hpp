#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace montage {

/// NFC normalization, every run of Unicode whitespace collapsed to a single
/// ASCII space, leading and trailing whitespace removed. Invalid UTF-8 is
/// replaced with U+FFFD.
std::string normalize_text(std::string_view text);

/// normalize_text plus full case folding, with surrounding quotes and
/// trailing sentence punctuation dropped. Two strings that differ only in
/// those respects share a match key.
std::string match_key(std::string_view text);

/// Case-folded alphanumeric runs of `text`.
std::set<std::string> token_set(std::string_view text);

/// |a ∩ b| / |a ∪ b|; 1 when both are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

std::string_view trim(std::string_view text) noexcept;
std::string to_lower_ascii(std::string_view text);
std::vector<std::string_view> split_lines(std::string_view text);

}  // namespace montage
