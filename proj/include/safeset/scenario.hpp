#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "safeset/oss.hpp"
#include "safeset/rng.hpp"

namespace safeset {

/// Internal plant state. It may carry more than the observed StatePoint (time,
/// latent offsets, a doomed flag); only the owning system interprets it.
using RawState = std::vector<double>;

/// A black-box discrete-time stochastic system composed with its test policy.
///
/// Implementations keep no state between calls: a run is a pure function of
/// the initial state and the random stream, so identical seeds reproduce
/// identical runs and one instance can serve concurrent runs.
class SystemModel {
public:
    virtual ~SystemModel() = default;

    /// Puts the plant into s0, or returns nullopt when it cannot be initialized there.
    virtual std::optional<RawState> initialize(const StatePoint& s0, Rng& rng) const = 0;

    virtual RawState step(const RawState& raw, Rng& rng) const = 0;

    virtual StatePoint observe(const RawState& raw) const = 0;

    /// Membership in the failure set C.
    virtual bool is_failure(const StatePoint& s) const = 0;
};

enum class Outcome { Safe, Failure, InitFailed };

enum class StepFlag { Ok, Held, Fail };

const char* to_string(Outcome outcome);
const char* to_string(StepFlag flag);

/// One recorded run of a scenario.
///
/// recorded[0] is the initial state and a completed run holds horizon + 1
/// states. A run refused at initialization records only the initial state.
/// After a failure at step k every later entry repeats recorded[k]; a step
/// whose observation left the OSS repeats the previous entry (held).
struct ScenarioRun {
    StatePoint initial;
    std::vector<StatePoint> recorded;
    std::vector<StepFlag> flags;
    Outcome outcome = Outcome::Safe;
    int failure_step = -1;
    int held_steps = 0;

    friend bool operator==(const ScenarioRun&, const ScenarioRun&) = default;
};

/// Unclamped observations of a run, for auditing held steps.
struct RawTrace {
    std::vector<StatePoint> observed;
};

/// Runs one scenario of spec.horizon steps from s0.
///
/// The plant keeps evolving while its observation is outside the OSS; only
/// the record holds. A failure state is recorded even when it is also outside
/// the OSS and absorbs the rest of the run.
ScenarioRun run_scenario(const SystemModel& sys, const OssSpec& spec, const StatePoint& s0, Rng& rng,
                         RawTrace* trace = nullptr);

ScenarioRun run_scenario(const SystemModel& sys, const OssSpec& spec, const StatePoint& s0, std::uint64_t seed);

/// Re-executes from s0 with seed and reports whether the record and outcome
/// are bit-identical to run.
bool replay_check(const ScenarioRun& run, const SystemModel& sys, const OssSpec& spec, const StatePoint& s0,
                  std::uint64_t seed);

}  // namespace safeset
