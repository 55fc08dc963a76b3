#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "safeset/oss.hpp"
#include "safeset/scenario.hpp"

namespace safeset {

/// Failures out of trials runs from one centroid. Trial t draws its stream
/// from derive_seed(seed, stream, t), so a longer sweep with the same seed
/// repeats every earlier trial. A run refused at initialization counts as a
/// failure.
std::size_t count_failures(const SystemModel& sys, const OssSpec& spec, const StatePoint& centroid,
                           std::size_t trials, std::uint64_t seed, std::uint64_t stream = 0);

/// count_failures / trials. Throws DomainError for trials == 0.
double estimate_failure_prob(const SystemModel& sys, const OssSpec& spec, const StatePoint& centroid,
                             std::size_t trials, std::uint64_t seed, std::uint64_t stream = 0);

struct OracleEntry {
    CentroidId id;
    std::size_t failures = 0;
    double p_hat = 0.0;
};

struct OracleResult {
    CoveringSet grid;
    std::vector<OracleEntry> entries;
    std::size_t trials = 0;
    double epsilon = 0.0;
    /// Centroids with p_hat <= epsilon, keeping their grid ids.
    CoveringSet safe_set;
};

/// Estimates every centroid of grid with trials runs each, the stream of a
/// centroid keyed by its id. threads == 0 uses the hardware concurrency.
/// Results do not depend on the thread count.
OracleResult oracle_safe_set(const SystemModel& sys, const CoveringSet& grid, double epsilon, std::size_t trials,
                             std::uint64_t seed, unsigned threads = 0);

/// Full-lattice sweep over spec. Throws CapacityError when the lattice is too large.
OracleResult oracle_safe_set(const SystemModel& sys, const OssSpec& spec, double epsilon, std::size_t trials,
                             std::uint64_t seed, unsigned threads = 0, std::size_t capacity = kDefaultCapacity);

struct CompareMetrics {
    double iou = 0.0;
    /// Cells in the quantified set but not in the oracle set.
    std::size_t unsound_count = 0;
    /// Cells in the oracle set but not in the quantified set.
    std::size_t missed_count = 0;

    friend bool operator==(const CompareMetrics&, const CompareMetrics&) = default;
};

CompareMetrics compare(const CellSet& quantified, const CellSet& oracle);

/// Throws GridMismatchError unless both sets share one OSS.
CompareMetrics compare(const CoveringSet& quantified, const CoveringSet& oracle);

}  // namespace safeset
