#pragma once

// DoveScore: decompose a target into event and descriptive facts, verify each
// against the source, compare the chronology of the verified event facts in
// source and target, and combine
//
//   score = alpha * S_E * S_EO + (1 - alpha) * S_D,   alpha = |F_E| / (|F_E| + |F_D|)
//
// where S_E and S_D are the verified fractions of event and descriptive facts
// and S_EO = 1 - ShuffleD(source order, target order) of the verified events.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "montage/backend.hpp"
#include "montage/corpus.hpp"

namespace montage {

struct AuditEntry {
  std::string stage;
  std::string prompt;
  std::string response;
};

using AuditTrail = std::vector<AuditEntry>;

struct DoveScoreComponents {
  double alpha;
  double s_event;
  double s_desc;
  double score;
};

/// Weighted combination of fact counts and the order score. S_E (S_D) is 1
/// when there are no event (descriptive) facts; its weight is then 0.
/// Throws Errc::empty_decomposition when both counts are zero and
/// Errc::invariant_violation when a correct count exceeds its total or
/// s_order lies outside [0, 1].
DoveScoreComponents compute_dovescore(std::size_t n_event, std::size_t n_event_correct,
                                      std::size_t n_desc, std::size_t n_desc_correct,
                                      double s_order);

/// 1 - ShuffleD between two orderings of the same index set; 1 for sets of
/// at most one element. Throws Errc::not_a_permutation otherwise mismatched.
double event_order_score(std::span<const std::size_t> source_order,
                         std::span<const std::size_t> target_order);

/// Splits `target` into event and descriptive facts; verdicts start out
/// unverifiable. Throws Errc::empty_decomposition if both lists are empty.
FactSet decompose(std::string_view target, Backend& backend, AuditTrail* audit = nullptr);

/// One verification call per fact; fills both verdict lists. Up to `jobs`
/// calls run concurrently. Errors name the failing fact.
FactSet check_facts(FactSet facts, std::string_view source, Backend& backend,
                    AuditTrail* audit = nullptr, unsigned jobs = 1);

/// Chronological order of `events` according to `paragraph`, as positions
/// into `events`. Returned strings are matched back by normalized equality,
/// then by the best token Jaccard overlap (at least kMatchThreshold). Input
/// events the sorter dropped are appended in input order; repeated matches
/// keep their first occurrence. Throws Errc::unparseable_order, or
/// Errc::match_failure when more than half of the returned items match
/// nothing.
std::vector<std::size_t> order_events(std::string_view paragraph,
                                      std::span<const std::string> events, Backend& backend,
                                      AuditTrail* audit = nullptr,
                                      std::string_view stage = "sort");

inline constexpr double kMatchThreshold = 0.5;

struct DoveScoreOptions {
  /// Ask the sorter for the target order too, instead of using the
  /// decomposer's emission order.
  bool two_call_sorter = false;
  /// Force S_EO = 1: an order-blind fact-precision score.
  bool order_blind = false;
  /// Concurrent fact-check calls per evaluation.
  unsigned jobs = 1;
};

struct DoveScoreResult {
  double s_event = 0.0;
  double s_order = 1.0;
  double s_desc = 0.0;
  double alpha = 0.0;
  double score = 0.0;
  FactSet facts;
  /// Indices into facts.event_facts of the verified event facts, in source
  /// chronology and in target chronology.
  std::vector<std::size_t> source_order;
  std::vector<std::size_t> target_order;
  AuditTrail audit;
};

/// Full pipeline. Errors carry the stage label ("decompose", "check",
/// "sort:source", "sort:target"); no partial result is returned.
DoveScoreResult evaluate_dovescore(std::string_view source, std::string_view target,
                                   Backend& backend, const DoveScoreOptions& options = {});

std::string to_json(const DoveScoreResult& result, bool include_audit);

}  // namespace montage
