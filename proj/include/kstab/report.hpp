#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kstab/config.hpp"

namespace kstab {

inline constexpr std::string_view kToolkitName = "kstab";
inline constexpr std::string_view kToolkitVersion = "0.1.0";

/// Label attached to every output that quantifies over finitely many measures or candidates.
inline constexpr std::string_view kEvidenceLabel =
    "finite-instance evidence: computed over the listed measures only, not a statement about all "
    "divisorial measures";

struct RunOptions {
  std::optional<std::uint64_t> seed;
  /// (key, value) with key in {quadrature, optimizer, gradient}.
  std::vector<std::pair<std::string, double>> tolerance_overrides;
  /// Adds wall_time_s to each task report; off by default so reports stay byte-identical.
  bool timing = false;
};

struct RunResult {
  nlohmann::json report;
  int exit_code = 0;
};

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// 0 success, 1 unexpected failure, 2 schema, 3 geometry, 4 convergence.
int exit_code_for(const std::exception& e);

/// Runs the tasks in order. The first failing task ends the run with an error element.
RunResult run_job(const JobConfig& job, const std::string& config_hash, const RunOptions& options = {});

/// Reads, parses and runs a config file. Parse failures become a single error element.
RunResult run_config_file(const std::filesystem::path& path, const RunOptions& options = {});

}  // namespace kstab
