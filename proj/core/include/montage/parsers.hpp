#pragma once

// Strict parsers for backend responses. Each accepts the format its prompt
// asks for plus one lenient fallback; anything else is a declared error.

#include <string>
#include <string_view>
#include <vector>

#include "montage/corpus.hpp"

namespace montage {

/// Bulleted ("-", "*", "•") or numbered ("1.", "1)") lines, markers stripped,
/// order kept. When no line carries a marker every non-empty line is taken.
/// Throws Errc::empty_event_list when nothing remains.
std::vector<std::string> parse_event_list(std::string_view raw);

struct FactLists {
  std::vector<std::string> event_facts;
  std::vector<std::string> descriptive_facts;
};

/// Finds the "Event Facts" and "Descriptive Facts" headings (case-insensitive,
/// any decoration) and parses the lines under each. Either list may be empty;
/// a lone "None" / "N/A" item counts as empty. Throws Errc::missing_section
/// with detail "event" or "descriptive" when a heading is absent.
FactLists parse_fact_lists(std::string_view raw);

/// "true" -> correct, "false" -> incorrect on the first word (case and
/// surrounding punctuation ignored); everything else is unverifiable.
Verdict parse_verdict(std::string_view raw);

/// "[e1, e2, ...]" (items may be quoted), falling back to a marked line list.
/// Throws Errc::unparseable_order.
std::vector<std::string> parse_sorted_events(std::string_view raw);

enum class NarrativeTechnique { chronological, flashback, interjection, supplementary_narration };

std::string_view to_string(NarrativeTechnique t) noexcept;

struct RephraseResult {
  NarrativeTechnique original;
  NarrativeTechnique chosen;
  std::string rephrased;
};

/// Reads the three labelled fields of a rephrase response. Throws
/// Errc::missing_field (detail = label) or Errc::unknown_technique.
RephraseResult parse_rephrase(std::string_view raw);

/// First integer in 1..5 after an optional "Consistency:" label.
/// Throws Errc::no_score_found.
int parse_consistency_score(std::string_view raw);

}  // namespace montage
