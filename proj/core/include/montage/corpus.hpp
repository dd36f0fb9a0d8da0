#pragma once

// Data model and JSON Lines formats for seed pairs, benchmark instances,
// fact sets and evaluation reports.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "montage/permutation.hpp"

namespace montage {

/// Fixed-size table indexed by difficulty level.
template <class T>
struct PerDifficulty {
  std::array<T, 4> values{};

  T& operator[](Difficulty d) { return values[static_cast<std::size_t>(d)]; }
  const T& operator[](Difficulty d) const { return values[static_cast<std::size_t>(d)]; }

  friend bool operator==(const PerDifficulty&, const PerDifficulty&) = default;
};

struct SeedPair {
  std::string id;
  std::string source;
  std::string summary;
  std::string origin;

  friend bool operator==(const SeedPair&, const SeedPair&) = default;
};

struct InstanceMeta {
  std::string origin;
  std::size_t num_events = 0;
  PerDifficulty<std::uint64_t> target_inversions;
  PerDifficulty<double> achieved_shuffle_degree;
  std::string generator_model;
  std::uint64_t seed = 0;

  friend bool operator==(const InstanceMeta&, const InstanceMeta&) = default;
};

struct Paraphrases {
  std::string correct;
  PerDifficulty<std::string> lies;

  friend bool operator==(const Paraphrases&, const Paraphrases&) = default;
};

/// One benchmark tuple: source, the aligned target, a lie per difficulty and
/// a paraphrase of each of those five targets. The aligned target and its
/// paraphrase are positives; every lie and lie paraphrase is a negative.
struct DataInstance {
  std::string id;
  std::string source;
  std::string correct;
  PerDifficulty<std::string> lies;
  Paraphrases paraphrases;
  InstanceMeta meta;

  friend bool operator==(const DataInstance&, const DataInstance&) = default;
};

enum class Verdict { correct, incorrect, unverifiable };

std::string_view to_string(Verdict v) noexcept;

/// Decomposed target facts. Event facts keep the order the decomposer emitted
/// them in, which is the target's narrated chronology.
struct FactSet {
  std::vector<std::string> event_facts;
  std::vector<std::string> descriptive_facts;
  std::vector<Verdict> event_verdicts;
  std::vector<Verdict> descriptive_verdicts;

  /// Sets every verdict to unverifiable, sized to the fact lists.
  void reset_verdicts();
  /// Throws Errc::invariant_violation when verdicts do not cover the facts.
  void validate() const;

  friend bool operator==(const FactSet&, const FactSet&) = default;
};

struct Exclusion {
  std::string instance_id;
  std::string variant;
  std::string error;

  friend bool operator==(const Exclusion&, const Exclusion&) = default;
};

struct EvaluationReport {
  std::string evaluator_name;
  PerDifficulty<double> per_difficulty_auc;
  double average_auc = 0.0;
  std::size_t num_instances = 0;
  bool include_paraphrases = false;
  std::uint64_t master_seed = 0;
  std::vector<Exclusion> exclusions;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

/// One seed pair that could not be turned into an instance.
struct FailureRecord {
  std::string seed_id;
  std::string stage;
  std::string error;
  std::uint64_t master_seed = 0;

  friend bool operator==(const FailureRecord&, const FailureRecord&) = default;
};

// Validation. Each throws Errc::missing_field (detail names the field) or
// Errc::invariant_violation.
void validate(const SeedPair& seed);
void validate(const DataInstance& instance);
void validate(const EvaluationReport& report);

// Single-record codecs. `line_no` is one-based and only used in messages.
SeedPair parse_seed_line(std::string_view line, std::size_t line_no = 0);
std::string to_json_line(const SeedPair& seed);
DataInstance parse_instance_line(std::string_view line, std::size_t line_no = 0);
std::string to_json_line(const DataInstance& instance);
std::string to_json_line(const FailureRecord& failure);
std::string to_json(const EvaluationReport& report);
EvaluationReport parse_report(std::string_view text);

// Files. Blank lines are skipped; errors carry the one-based line number.
std::vector<SeedPair> read_seed_file(const std::filesystem::path& path);
void write_seed_file(const std::filesystem::path& path, std::span<const SeedPair> seeds);
std::vector<DataInstance> read_instances(const std::filesystem::path& path);
/// Validates every instance before opening the file; nothing is written if
/// any instance is invalid.
void write_instances(const std::filesystem::path& path,
                     std::span<const DataInstance> instances);
void write_failures(const std::filesystem::path& path,
                    std::span<const FailureRecord> failures);
void write_report(const std::filesystem::path& path, const EvaluationReport& report);
EvaluationReport read_report(const std::filesystem::path& path);

/// Whole-file helpers shared by the CLI and the readers above.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace montage
