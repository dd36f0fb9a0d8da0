#pragma once

// Difficulty-stratified AUC-ROC of alignment evaluators over a benchmark.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "montage/backend.hpp"
#include "montage/corpus.hpp"
#include "montage/dovescore.hpp"

namespace montage {

/// Scores how well `target` aligns with `source`; higher is better aligned.
struct AlignmentEvaluator {
  std::string name;
  std::function<double(std::string_view source, std::string_view target)> score;
};

enum class VariantKind { correct, correct_paraphrase, lie, lie_paraphrase };

struct Variant {
  VariantKind kind = VariantKind::correct;
  Difficulty difficulty = Difficulty::easy;  // lie kinds only

  /// 1 for the aligned target and its paraphrase, 0 otherwise.
  int label() const noexcept;
  /// Position in the canonical per-instance ordering.
  int rank() const noexcept;

  friend bool operator==(const Variant& a, const Variant& b) noexcept {
    return a.rank() == b.rank();
  }
};

/// "correct", "correct_paraphrase", "lie:<difficulty>",
/// "lie_paraphrase:<difficulty>".
std::string to_string(const Variant& v);
std::optional<Variant> parse_variant(std::string_view name);

/// The variants an evaluation scores for one instance, in canonical order.
std::vector<Variant> required_variants(bool include_paraphrases);

/// Target text of `v` in `instance`.
const std::string& target_text(const DataInstance& instance, const Variant& v);

struct ScoredPair {
  std::string instance_id;
  Variant variant;
  double score = 0.0;
  int label = 0;

  friend bool operator==(const ScoredPair&, const ScoredPair&) = default;
};

/// Probability that a positive outscores a negative, ties counted one half.
/// Computed from midranks in O((P+N) log(P+N)). Throws Errc::empty_side.
double auc_roc(std::span<const double> positives, std::span<const double> negatives);

struct BenchmarkRun {
  EvaluationReport report;
  /// Every successful score, sorted by (instance_id, variant).
  std::vector<ScoredPair> pairs;
};

/// Re-derives a report from raw scores. Instances missing any required
/// variant are excluded from all four AUCs and listed in the exclusions.
/// Throws Errc::empty_side when no complete instance remains.
EvaluationReport aggregate_scores(std::string evaluator_name, std::span<const ScoredPair> pairs,
                                  bool include_paraphrases,
                                  std::vector<Exclusion> failures = {});

/// Scores every required variant once (up to `jobs` concurrently) and
/// aggregates. An evaluator exception on one variant excludes its instance.
BenchmarkRun evaluate_benchmark(std::span<const DataInstance> dataset,
                                const AlignmentEvaluator& evaluator, bool include_paraphrases,
                                unsigned jobs = 1, std::uint64_t master_seed = 0);

/// Coarse 1-5 consistency rating of the whole pair in one call.
double coarse_llm_score(std::string_view source, std::string_view target, Backend& backend);

AlignmentEvaluator coarse_llm_evaluator(Backend& backend);
AlignmentEvaluator dovescore_evaluator(Backend& backend, DoveScoreOptions options = {});
AlignmentEvaluator constant_evaluator(double value = 0.5);
/// Scores 1 for texts that are a positive target somewhere in `dataset` and
/// 0 for everything else.
AlignmentEvaluator oracle_evaluator(std::span<const DataInstance> dataset);

std::string to_json_line(const ScoredPair& pair);
ScoredPair parse_scored_pair_line(std::string_view line, std::size_t line_no = 0);
void write_scores(const std::filesystem::path& path, std::span<const ScoredPair> pairs);
std::vector<ScoredPair> read_scores(const std::filesystem::path& path);

}  // namespace montage
