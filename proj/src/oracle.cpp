#include "safeset/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "safeset/error.hpp"
#include "safeset/rng.hpp"

namespace safeset {

std::size_t count_failures(const SystemModel& sys, const OssSpec& spec, const StatePoint& centroid,
                           std::size_t trials, std::uint64_t seed, std::uint64_t stream) {
    std::size_t failures = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto run = run_scenario(sys, spec, centroid, derive_seed(seed, stream, t));
        if (run.outcome != Outcome::Safe) {
            ++failures;
        }
    }
    return failures;
}

double estimate_failure_prob(const SystemModel& sys, const OssSpec& spec, const StatePoint& centroid,
                             std::size_t trials, std::uint64_t seed, std::uint64_t stream) {
    if (trials == 0) {
        throw DomainError("oracle needs at least one trial per centroid");
    }
    return static_cast<double>(count_failures(sys, spec, centroid, trials, seed, stream)) /
           static_cast<double>(trials);
}

OracleResult oracle_safe_set(const SystemModel& sys, const CoveringSet& grid, double epsilon, std::size_t trials,
                             std::uint64_t seed, unsigned threads) {
    if (trials == 0) {
        throw DomainError("oracle needs at least one trial per centroid");
    }
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw DomainError("oracle threshold must lie in [0, 1]");
    }

    const auto ids = grid.ids();
    std::vector<OracleEntry> entries(ids.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        try {
            for (auto i = next.fetch_add(1); i < ids.size(); i = next.fetch_add(1)) {
                const auto id = ids[i];
                const auto failures = count_failures(sys, grid.spec(), grid.centroid(id), trials, seed, id.value);
                entries[i] = OracleEntry{id, failures, static_cast<double>(failures) / static_cast<double>(trials)};
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) {
                error = std::current_exception();
            }
            next.store(ids.size());
        }
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, ids.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    CoveringSet safe(grid.spec(), grid.capacity());
    for (const auto& e : entries) {
        if (e.p_hat <= epsilon) {
            safe.insert_with_id(e.id, grid.centroid(e.id));
        }
    }
    return OracleResult{grid, std::move(entries), trials, epsilon, std::move(safe)};
}

OracleResult oracle_safe_set(const SystemModel& sys, const OssSpec& spec, double epsilon, std::size_t trials,
                             std::uint64_t seed, unsigned threads, std::size_t capacity) {
    return oracle_safe_set(sys, build_initial_covering(spec, capacity), epsilon, trials, seed, threads);
}

CompareMetrics compare(const CellSet& quantified, const CellSet& oracle) {
    const CellSet sets[] = {quantified, oracle};
    CompareMetrics m;
    m.iou = iou(sets);
    for (const auto& c : quantified) {
        m.unsound_count += oracle.count(c) == 0 ? 1 : 0;
    }
    for (const auto& c : oracle) {
        m.missed_count += quantified.count(c) == 0 ? 1 : 0;
    }
    return m;
}

CompareMetrics compare(const CoveringSet& quantified, const CoveringSet& oracle) {
    if (!(quantified.spec() == oracle.spec())) {
        throw GridMismatchError("compared sets were built over different OSS declarations");
    }
    return compare(quantified.cells(), oracle.cells());
}

}  // namespace safeset
