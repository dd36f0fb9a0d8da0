#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace montage {

/// Every failure the toolkit reports is one of these codes. The names returned
/// by to_string() are stable and appear verbatim in failure records and
/// CLI error messages.
enum class Errc {
  // permutations
  not_a_permutation,
  invalid_lehmer_code,
  target_out_of_range,
  empty_band,
  // corpus files
  malformed_line,
  missing_field,
  invariant_violation,
  io_failure,
  // backends
  timeout,
  rate_limited,
  transport_failure,
  no_scripted_response,
  unfilled_placeholder,
  empty_response,
  // response parsers
  empty_event_list,
  missing_section,
  unparseable_order,
  unknown_technique,
  no_score_found,
  // pipelines
  too_few_events,
  same_technique,
  empty_decomposition,
  match_failure,
  empty_side,
  usage,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
  Error(Errc code, std::string detail);
  Error(Errc code, std::string detail, std::string stage);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  /// Pipeline stage that raised the error ("decompose", "lie:easy", ...);
  /// empty when the error did not pass through a pipeline.
  const std::string& stage() const noexcept { return stage_; }

  /// Same error, relabelled with the pipeline stage it surfaced from. An
  /// existing label is kept so the innermost stage wins.
  Error at_stage(std::string stage) const;

private:
  Errc code_;
  std::string detail_;
  std::string stage_;
};

}  // namespace montage
