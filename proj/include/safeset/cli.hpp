#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace safeset::cli {

/// Exit codes shared by every command.
enum ExitCode : int {
    kOk = 0,
    kError = 1,
    kBudgetExhausted = 2,
    kFalsified = 3,
    kCoverageViolated = 4,
};

struct CommonOptions {
    std::string config;
    /// Overrides the config's output_dir.
    std::optional<std::string> out;
    /// Overrides the config's seed.
    std::optional<std::uint64_t> seed;
};

/// report.json, centroids.csv and runs.jsonl. 0 Certified, 2 BudgetExhausted.
int cmd_quantify(const CommonOptions& opts, std::ostream& out, std::ostream& err);

/// verdict.json, plus witness_trace.csv when a run ended validation early.
/// 0 Validated, 3 Falsified, 4 CoverageViolated.
int cmd_validate(const CommonOptions& opts, const std::string& candidate, std::ostream& out, std::ostream& err);

/// oracle.csv (per-centroid p_hat) and oracle_safe.csv.
int cmd_oracle(const CommonOptions& opts, std::ostream& out, std::ostream& err);

/// compare.json. Two sets give iou, unsound_count and missed_count (first set
/// taken as the quantified one); more give the joint iou only.
int cmd_compare(const CommonOptions& opts, const std::vector<std::string>& sets, std::ostream& out,
                std::ostream& err);

/// plot.svg for one slice of a centroid or oracle CSV.
int cmd_plot(const CommonOptions& opts, const std::string& set, const std::string& dims, const std::string& slice,
             std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a command.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace safeset::cli
