#pragma once

// Orderings of event lists: inversion counting, shuffle degree, Lehmer-code
// decoding and random shuffles with an exact inversion count.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "montage/error.hpp"
#include "montage/rng.hpp"

namespace montage {

/// A bijection on {1..n}, stored one-based: value(i) is the original position
/// of the element found at (zero-based) position i of the shuffled list.
class Permutation {
public:
  /// Throws Errc::not_a_permutation unless `one_based` holds each of 1..n
  /// exactly once, n >= 1.
  explicit Permutation(std::vector<std::size_t> one_based);

  static Permutation identity(std::size_t n);
  static Permutation reversal(std::size_t n);

  std::size_t size() const noexcept { return mapping_.size(); }
  std::size_t operator[](std::size_t i) const { return mapping_[i]; }
  std::span<const std::size_t> values() const noexcept { return mapping_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;

private:
  std::vector<std::size_t> mapping_;
};

/// Lehmer code e_1..e_n with 0 <= e_i <= n - i (one-based i).
class InversionSequence {
public:
  /// Throws Errc::invalid_lehmer_code when a bound is violated.
  explicit InversionSequence(std::vector<std::uint64_t> entries);

  /// The code of the full reversal: e_i = n - i.
  static InversionSequence maximal(std::size_t n);

  std::size_t size() const noexcept { return entries_.size(); }
  std::span<const std::uint64_t> entries() const noexcept { return entries_; }
  std::uint64_t total() const noexcept;

private:
  std::vector<std::uint64_t> entries_;
};

enum class Difficulty { easy, medium, hard, extreme };

inline constexpr std::array<Difficulty, 4> kDifficulties{
    Difficulty::easy, Difficulty::medium, Difficulty::hard, Difficulty::extreme};

std::string_view to_string(Difficulty level) noexcept;
std::optional<Difficulty> parse_difficulty(std::string_view name) noexcept;

/// Closed shuffle-degree interval of a difficulty level. Bounds are kept as
/// integer percentages so band arithmetic on inversion counts is exact.
struct DifficultyBand {
  Difficulty level;
  std::uint32_t lo_percent;
  std::uint32_t hi_percent;

  double lo() const noexcept { return lo_percent / 100.0; }
  double hi() const noexcept { return hi_percent / 100.0; }

  /// Exact test of inversions / max_inversions in [lo, hi].
  bool contains(std::uint64_t inversions, std::uint64_t max_inv) const noexcept;
};

/// easy [0.80,0.90], medium [0.55,0.65], hard [0.30,0.40], extreme [0.05,0.15].
DifficultyBand band(Difficulty level) noexcept;

std::uint64_t max_inversions(std::size_t n) noexcept;

/// Number of pairs i < j with values[i] > values[j]. Merge-based, O(n log n).
std::uint64_t inversion_count(std::span<const std::size_t> values);
std::uint64_t inversion_count(const Permutation& perm);

/// Inv(perm) / max_inversions(n); 0 for n <= 1.
double shuffle_degree(const Permutation& perm);

/// The permutation pi with shuffled[i] == original[pi(i)] under exact
/// equality of T. Throws Errc::not_a_permutation on length mismatch,
/// duplicates in `original`, or items of `shuffled` that are missing or
/// repeated.
template <class T>
Permutation permutation_between_exact(std::span<const T> original,
                                      std::span<const T> shuffled) {
  if (original.size() != shuffled.size())
    throw Error(Errc::not_a_permutation,
                "length mismatch: " + std::to_string(original.size()) +
                    " vs " + std::to_string(shuffled.size()));
  if (original.empty())
    throw Error(Errc::not_a_permutation, "empty list");
  std::map<T, std::size_t> position;
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (!position.emplace(original[i], i + 1).second)
      throw Error(Errc::not_a_permutation,
                  "duplicate item at original position " + std::to_string(i + 1));
  }
  std::vector<std::size_t> mapping;
  mapping.reserve(shuffled.size());
  std::vector<bool> seen(original.size() + 1, false);
  for (std::size_t i = 0; i < shuffled.size(); ++i) {
    auto it = position.find(shuffled[i]);
    if (it == position.end())
      throw Error(Errc::not_a_permutation,
                  "shuffled item " + std::to_string(i + 1) + " not in original");
    if (seen[it->second])
      throw Error(Errc::not_a_permutation,
                  "shuffled item " + std::to_string(i + 1) + " repeated");
    seen[it->second] = true;
    mapping.push_back(it->second);
  }
  return Permutation(std::move(mapping));
}

/// Text items are compared after Unicode NFC normalization and whitespace
/// collapsing (see normalize_text).
Permutation permutation_between(std::span<const std::string> original,
                                std::span<const std::string> shuffled);

double shuffle_degree(std::span<const std::string> original,
                      std::span<const std::string> shuffled);

/// Decodes `code` against the sorted order of the first `n` naturals: the
/// zero-based permutation whose i-th entry is the (e_i+1)-th smallest index
/// not yet taken.
std::vector<std::size_t> lehmer_decode_indices(const InversionSequence& code);

/// Decodes `code` against a sorted copy of `items` (ordered by operator<).
/// The result has exactly code.total() inversions relative to that sorted
/// order. Throws Errc::invalid_lehmer_code on length mismatch.
template <class T>
std::vector<T> lehmer_decode(const InversionSequence& code, std::vector<T> items) {
  if (code.size() != items.size())
    throw Error(Errc::invalid_lehmer_code,
                "code length " + std::to_string(code.size()) + " != item count " +
                    std::to_string(items.size()));
  std::stable_sort(items.begin(), items.end());
  std::vector<T> out;
  out.reserve(items.size());
  for (std::size_t index : lehmer_decode_indices(code)) out.push_back(items[index]);
  return out;
}

/// Random permutation of n positions with exactly `target` inversions: start
/// from the maximal Lehmer code and decrement entries chosen uniformly among
/// the positive ones until the total equals `target`, then decode.
/// Throws Errc::target_out_of_range when target > max_inversions(n).
Permutation random_permutation_with_inversions(std::size_t n, std::uint64_t target,
                                               Rng& rng);

/// Rearranges `items` (taken as the reference order) so that the result has
/// exactly `target` inversions relative to it.
template <class T>
std::vector<T> random_shuffle_with_inversions(std::span<const T> items,
                                              std::uint64_t target, Rng& rng) {
  if (items.empty()) {
    if (target != 0) throw Error(Errc::target_out_of_range, "empty list");
    return {};
  }
  const Permutation perm = random_permutation_with_inversions(items.size(), target, rng);
  std::vector<T> out;
  out.reserve(items.size());
  for (std::size_t p : perm.values()) out.push_back(items[p - 1]);
  return out;
}

/// Integer interval [ceil(lo*M), floor(hi*M)] of inversion counts for `level`
/// with M = max_inversions(n). Throws Errc::empty_band if it holds no integer.
std::pair<std::uint64_t, std::uint64_t> inversion_target_range(std::size_t n,
                                                               Difficulty level);

/// Uniform draw from inversion_target_range(n, level).
std::uint64_t sample_inversion_target(std::size_t n, Difficulty level, Rng& rng);

}  // namespace montage
