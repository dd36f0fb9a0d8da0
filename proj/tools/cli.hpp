#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "montage/backend.hpp"

namespace montage::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kUsageError = 2 };

/// Settings shared by every command. Resolved from flags, then the
/// environment (ALIGN_BACKEND, ALIGN_MODEL, ALIGN_SEED, ALIGN_JOBS), then an
/// optional JSON config file, in that order of precedence.
struct RunConfig {
  std::optional<BackendDescriptor> backend;
  std::string model = "gpt-4o-mini-2024-07-18";
  std::uint64_t master_seed = 0;
  unsigned jobs = 1;
  bool include_paraphrases = false;
  bool verbose = false;
  bool two_call_sorter = false;
  std::optional<std::filesystem::path> record_fixture;
};

/// Runs one command line (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace montage::cli
