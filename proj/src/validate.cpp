#include "safeset/validate.hpp"

#include "safeset/error.hpp"
#include "safeset/quantify.hpp"
#include "safeset/rng.hpp"

namespace safeset {

const char* to_string(ValidationOutcome outcome) {
    switch (outcome) {
        case ValidationOutcome::Validated:
            return "validated";
        case ValidationOutcome::Falsified:
            return "falsified";
        case ValidationOutcome::CoverageViolated:
            return "coverage_violated";
    }
    return "unknown";
}

ValidationVerdict validate(const SystemModel& sys, const OssSpec& spec, const CoveringSet& candidate,
                           double epsilon, double beta, std::uint64_t seed) {
    ValidationVerdict verdict;
    verdict.required = sample_count(epsilon, beta);
    verdict.epsilon = epsilon;
    verdict.beta = beta;
    if (!(candidate.spec() == spec)) {
        throw GridMismatchError("candidate set was built over a different OSS");
    }
    if (candidate.empty()) {
        throw EmptySetError("cannot validate an empty candidate set");
    }

    Rng picker(seed);
    for (std::size_t i = 0; i < verdict.required; ++i) {
        const auto id = candidate.ids()[picker.index(candidate.size())];
        const auto run_seed = derive_seed(seed, i);
        auto run = run_scenario(sys, spec, candidate.centroid(id), run_seed);
        verdict.runs_used = i + 1;

        if (run.outcome != Outcome::Safe) {
            verdict.outcome = ValidationOutcome::Falsified;
        } else {
            for (std::size_t t = 1; t < run.recorded.size(); ++t) {
                if (!candidate.contains(run.recorded[t])) {
                    verdict.outcome = ValidationOutcome::CoverageViolated;
                    verdict.escaping_state = run.recorded[t];
                    verdict.escaping_step = static_cast<int>(t);
                    break;
                }
            }
        }
        if (verdict.outcome != ValidationOutcome::Validated) {
            verdict.witness = std::move(run);
            verdict.witness_id = id;
            verdict.witness_seed = run_seed;
            return verdict;
        }
    }
    return verdict;
}

}  // namespace safeset
