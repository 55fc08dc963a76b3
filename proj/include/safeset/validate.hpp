#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "safeset/oss.hpp"
#include "safeset/scenario.hpp"

namespace safeset {

enum class ValidationOutcome { Validated, Falsified, CoverageViolated };

const char* to_string(ValidationOutcome outcome);

struct ValidationVerdict {
    ValidationOutcome outcome = ValidationOutcome::Validated;
    std::size_t runs_used = 0;
    std::size_t required = 0;
    double epsilon = 0.0;
    double beta = 0.0;

    /// Run that ended validation early, with its start and stream seed.
    std::optional<ScenarioRun> witness;
    std::optional<CentroidId> witness_id;
    std::uint64_t witness_seed = 0;

    /// First recorded state outside the covering (CoverageViolated only).
    std::optional<StatePoint> escaping_state;
    int escaping_step = -1;

    double confidence() const { return 1.0 - beta; }
};

/// Validates a candidate covering set with sample_count(epsilon, beta) runs
/// started i.i.d. uniformly from its centroids.
///
/// Stops at the first run that fails or cannot be initialized (Falsified) or
/// the first safe run that leaves the covering (CoverageViolated). Throws
/// EmptySetError for an empty candidate and GridMismatchError when the
/// candidate was built over a different OSS.
ValidationVerdict validate(const SystemModel& sys, const OssSpec& spec, const CoveringSet& candidate,
                           double epsilon, double beta, std::uint64_t seed);

}  // namespace safeset
