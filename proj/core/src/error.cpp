#include "montage/error.hpp"

namespace montage {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::not_a_permutation: return "NotAPermutation";
    case Errc::invalid_lehmer_code: return "InvalidLehmerCode";
    case Errc::target_out_of_range: return "TargetOutOfRange";
    case Errc::empty_band: return "EmptyBand";
    case Errc::malformed_line: return "MalformedLine";
    case Errc::missing_field: return "MissingField";
    case Errc::invariant_violation: return "InvariantViolation";
    case Errc::io_failure: return "IoFailure";
    case Errc::timeout: return "Timeout";
    case Errc::rate_limited: return "RateLimited";
    case Errc::transport_failure: return "TransportFailure";
    case Errc::no_scripted_response: return "NoScriptedResponse";
    case Errc::unfilled_placeholder: return "UnfilledPlaceholder";
    case Errc::empty_response: return "EmptyResponse";
    case Errc::empty_event_list: return "EmptyEventList";
    case Errc::missing_section: return "MissingSection";
    case Errc::unparseable_order: return "UnparseableOrder";
    case Errc::unknown_technique: return "UnknownTechnique";
    case Errc::no_score_found: return "NoScoreFound";
    case Errc::too_few_events: return "TooFewEvents";
    case Errc::same_technique: return "SameTechnique";
    case Errc::empty_decomposition: return "EmptyDecomposition";
    case Errc::match_failure: return "MatchFailure";
    case Errc::empty_side: return "EmptySide";
    case Errc::usage: return "Usage";
  }
  return "Unknown";
}

namespace {

std::string format_message(Errc code, const std::string& detail,
                           const std::string& stage) {
  std::string msg;
  if (!stage.empty()) msg += "[" + stage + "] ";
  msg += to_string(code);
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

Error::Error(Errc code, std::string detail)
    : Error(code, std::move(detail), std::string{}) {}

Error::Error(Errc code, std::string detail, std::string stage)
    : std::runtime_error(format_message(code, detail, stage)),
      code_(code),
      detail_(std::move(detail)),
      stage_(std::move(stage)) {}

Error Error::at_stage(std::string stage) const {
  if (!stage_.empty()) return *this;
  return Error(code_, detail_, std::move(stage));
}

}  // namespace montage
