#include "montage/permutation.hpp"

#include "montage/text.hpp"

namespace montage {

Permutation::Permutation(std::vector<std::size_t> one_based)
    : mapping_(std::move(one_based)) {
  const std::size_t n = mapping_.size();
  if (n == 0) throw Error(Errc::not_a_permutation, "empty mapping");
  std::vector<bool> seen(n + 1, false);
  for (std::size_t v : mapping_) {
    if (v < 1 || v > n)
      throw Error(Errc::not_a_permutation,
                  "value " + std::to_string(v) + " outside 1.." + std::to_string(n));
    if (seen[v])
      throw Error(Errc::not_a_permutation, "value " + std::to_string(v) + " repeated");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = i + 1;
  return Permutation(std::move(m));
}

Permutation Permutation::reversal(std::size_t n) {
  std::vector<std::size_t> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = n - i;
  return Permutation(std::move(m));
}

InversionSequence::InversionSequence(std::vector<std::uint64_t> entries)
    : entries_(std::move(entries)) {
  const std::size_t n = entries_.size();
  for (std::size_t i = 0; i < n; ++i) {
    // zero-based position i allows at most n - 1 - i smaller successors
    if (entries_[i] > n - 1 - i)
      throw Error(Errc::invalid_lehmer_code,
                  "entry " + std::to_string(i + 1) + " = " +
                      std::to_string(entries_[i]) + " exceeds bound " +
                      std::to_string(n - 1 - i));
  }
}

InversionSequence InversionSequence::maximal(std::size_t n) {
  std::vector<std::uint64_t> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = n - 1 - i;
  return InversionSequence(std::move(e));
}

std::uint64_t InversionSequence::total() const noexcept {
  std::uint64_t sum = 0;
  for (auto e : entries_) sum += e;
  return sum;
}

std::string_view to_string(Difficulty level) noexcept {
  switch (level) {
    case Difficulty::easy: return "easy";
    case Difficulty::medium: return "medium";
    case Difficulty::hard: return "hard";
    case Difficulty::extreme: return "extreme";
  }
  return "easy";
}

std::optional<Difficulty> parse_difficulty(std::string_view name) noexcept {
  for (Difficulty d : kDifficulties)
    if (to_string(d) == name) return d;
  return std::nullopt;
}

bool DifficultyBand::contains(std::uint64_t inversions,
                              std::uint64_t max_inv) const noexcept {
  if (max_inv == 0) return false;
  return 100 * inversions >= lo_percent * max_inv &&
         100 * inversions <= hi_percent * max_inv;
}

DifficultyBand band(Difficulty level) noexcept {
  switch (level) {
    case Difficulty::easy: return {level, 80, 90};
    case Difficulty::medium: return {level, 55, 65};
    case Difficulty::hard: return {level, 30, 40};
    case Difficulty::extreme: return {level, 5, 15};
  }
  return {level, 0, 0};
}

std::uint64_t max_inversions(std::size_t n) noexcept {
  return n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
}

namespace {

std::uint64_t merge_count(std::vector<std::size_t>& a, std::vector<std::size_t>& buf,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = merge_count(a, buf, lo, mid) + merge_count(a, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (a[j] < a[i]) {
      count += mid - i;
      buf[k++] = a[j++];
    } else {
      buf[k++] = a[i++];
    }
  }
  while (i < mid) buf[k++] = a[i++];
  while (j < hi) buf[k++] = a[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, a.begin() + lo);
  return count;
}

}  // namespace

std::uint64_t inversion_count(std::span<const std::size_t> values) {
  std::vector<std::size_t> work(values.begin(), values.end());
  std::vector<std::size_t> buf(work.size());
  return merge_count(work, buf, 0, work.size());
}

std::uint64_t inversion_count(const Permutation& perm) {
  return inversion_count(perm.values());
}

double shuffle_degree(const Permutation& perm) {
  const std::uint64_t max_inv = max_inversions(perm.size());
  if (max_inv == 0) return 0.0;
  return static_cast<double>(inversion_count(perm)) / static_cast<double>(max_inv);
}

Permutation permutation_between(std::span<const std::string> original,
                                std::span<const std::string> shuffled) {
  std::vector<std::string> a, b;
  a.reserve(original.size());
  b.reserve(shuffled.size());
  for (const auto& s : original) a.push_back(normalize_text(s));
  for (const auto& s : shuffled) b.push_back(normalize_text(s));
  return permutation_between_exact<std::string>(a, b);
}

double shuffle_degree(std::span<const std::string> original,
                      std::span<const std::string> shuffled) {
  if (original.empty() && shuffled.empty()) return 0.0;
  return shuffle_degree(permutation_between(original, shuffled));
}

std::vector<std::size_t> lehmer_decode_indices(const InversionSequence& code) {
  const std::size_t n = code.size();
  std::vector<std::size_t> remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = i;
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::uint64_t e : code.entries()) {
    // Bounds were validated on construction, so e < remaining.size().
    auto it = remaining.begin() + static_cast<std::ptrdiff_t>(e);
    out.push_back(*it);
    remaining.erase(it);
  }
  return out;
}

Permutation random_permutation_with_inversions(std::size_t n, std::uint64_t target,
                                               Rng& rng) {
  const std::uint64_t max_inv = max_inversions(n);
  if (n == 0 || target > max_inv)
    throw Error(Errc::target_out_of_range,
                "target " + std::to_string(target) + " outside [0, " +
                    std::to_string(max_inv) + "] for n = " + std::to_string(n));

  std::vector<std::uint64_t> code(n);
  std::vector<std::size_t> positive;  // positions with code[i] > 0
  for (std::size_t i = 0; i < n; ++i) {
    code[i] = n - 1 - i;
    if (code[i] > 0) positive.push_back(i);
  }
  for (std::uint64_t excess = max_inv - target; excess > 0; --excess) {
    const std::size_t slot = rng.uniform(0, positive.size() - 1);
    const std::size_t i = positive[slot];
    if (--code[i] == 0) {
      positive[slot] = positive.back();
      positive.pop_back();
    }
  }

  std::vector<std::size_t> mapping;
  mapping.reserve(n);
  for (std::size_t index : lehmer_decode_indices(InversionSequence(std::move(code))))
    mapping.push_back(index + 1);
  return Permutation(std::move(mapping));
}

std::pair<std::uint64_t, std::uint64_t> inversion_target_range(std::size_t n,
                                                               Difficulty level) {
  if (n < 2)
    throw Error(Errc::empty_band, "need at least 2 items, got " + std::to_string(n));
  const DifficultyBand b = band(level);
  const std::uint64_t m = max_inversions(n);
  const std::uint64_t lo = (b.lo_percent * m + 99) / 100;
  const std::uint64_t hi = (b.hi_percent * m) / 100;
  if (lo > hi)
    throw Error(Errc::empty_band, std::string(to_string(level)) + " band holds no " +
                                      "integer inversion count for n = " +
                                      std::to_string(n));
  return {lo, hi};
}

std::uint64_t sample_inversion_target(std::size_t n, Difficulty level, Rng& rng) {
  const auto [lo, hi] = inversion_target_range(n, level);
  return rng.uniform(lo, hi);
}

}  // namespace montage
