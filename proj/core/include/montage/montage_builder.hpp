#pragma once

// Builds benchmark instances from seed pairs: the aligned summary is split
// into events, the events are shuffled to a sampled inversion count per
// difficulty and re-narrated one event at a time, and every target gets a
// paraphrase in a different narrative technique.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "montage/backend.hpp"
#include "montage/corpus.hpp"
#include "montage/parsers.hpp"
#include "montage/permutation.hpp"
#include "montage/rng.hpp"

namespace montage {

/// Summaries that decompose into fewer events are rejected; five events keep
/// every difficulty band non-empty.
inline constexpr std::size_t kMinEvents = 5;

struct EventSequence {
  std::vector<std::string> events;
  std::string source_summary_id;
};

struct LieDraft {
  Difficulty difficulty = Difficulty::easy;
  std::vector<std::string> shuffled_events;
  std::uint64_t target_inversions = 0;
  std::string text;
};

/// Throws Errc::too_few_events (detail = count) below kMinEvents.
EventSequence decompose_events(std::string_view summary, Backend& backend,
                               std::string summary_id = {});

/// Narrates `events` in the given order: the paragraph starts as events[0]
/// verbatim and each later event is appended by one backend call.
std::string narrate_incrementally(std::span<const std::string> events, Backend& backend);

/// Samples an inversion target for `level`, shuffles the sequence to exactly
/// that many inversions and narrates the result.
LieDraft generate_lie(const EventSequence& seq, Difficulty level, Backend& backend, Rng& rng);

/// generate_lie with a caller-chosen inversion count instead of a sampled one.
LieDraft generate_lie_with_target(const EventSequence& seq, Difficulty level,
                                  std::uint64_t target_inversions, Backend& backend, Rng& rng);

struct Paraphrase {
  NarrativeTechnique original;
  NarrativeTechnique chosen;
  std::string text;
};

/// Throws Errc::same_technique when the backend reports reusing the original
/// technique.
Paraphrase paraphrase(std::string_view text, Backend& backend);

struct BuildOptions {
  /// Extra paraphrase attempts after a same-technique answer.
  unsigned paraphrase_retries = 1;
};

/// Builds one complete instance. The instance stream is master.split(seed.id)
/// and each difficulty draws from its own sub-stream. Errors carry the stage
/// that raised them ("decompose", "lie:hard", "paraphrase:correct", ...).
DataInstance build_instance(const SeedPair& seed, Backend& backend, const Rng& master,
                            const BuildOptions& options = {});

struct BuildResult {
  std::vector<DataInstance> instances;
  std::vector<FailureRecord> failures;
};

/// Builds every seed, up to `jobs` at a time. Output order follows input
/// order regardless of `jobs`. Per-seed failures are recorded, not thrown.
BuildResult build_dataset(std::span<const SeedPair> seeds, Backend& backend,
                          std::uint64_t master_seed, unsigned jobs = 1,
                          const BuildOptions& options = {});

}  // namespace montage
