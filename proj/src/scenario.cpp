#include "safeset/scenario.hpp"

#include "safeset/error.hpp"

namespace safeset {

const char* to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Safe:
            return "safe";
        case Outcome::Failure:
            return "failure";
        case Outcome::InitFailed:
            return "init_failed";
    }
    return "unknown";
}

const char* to_string(StepFlag flag) {
    switch (flag) {
        case StepFlag::Ok:
            return "ok";
        case StepFlag::Held:
            return "held";
        case StepFlag::Fail:
            return "fail";
    }
    return "unknown";
}

ScenarioRun run_scenario(const SystemModel& sys, const OssSpec& spec, const StatePoint& s0, Rng& rng,
                         RawTrace* trace) {
    if (!spec.in_oss(s0)) {
        throw SpecError("scenario must start inside the OSS");
    }
    ScenarioRun run;
    run.initial = s0;
    run.recorded.reserve(static_cast<std::size_t>(spec.horizon) + 1);
    run.recorded.push_back(s0);
    if (trace != nullptr) {
        trace->observed.assign(1, s0);
    }

    auto raw = sys.initialize(s0, rng);
    if (!raw) {
        run.outcome = Outcome::InitFailed;
        run.flags.push_back(StepFlag::Fail);
        return run;
    }
    if (sys.is_failure(s0)) {
        run.outcome = Outcome::Failure;
        run.failure_step = 0;
        run.flags.assign(static_cast<std::size_t>(spec.horizon) + 1, StepFlag::Fail);
        run.recorded.assign(static_cast<std::size_t>(spec.horizon) + 1, s0);
        return run;
    }
    run.flags.push_back(StepFlag::Ok);

    for (int t = 1; t <= spec.horizon; ++t) {
        *raw = sys.step(*raw, rng);
        auto obs = sys.observe(*raw);
        spec.check_dims(obs);
        if (trace != nullptr) {
            trace->observed.push_back(obs);
        }
        if (sys.is_failure(obs)) {
            run.outcome = Outcome::Failure;
            run.failure_step = t;
            const auto remaining = static_cast<std::size_t>(spec.horizon - t + 1);
            run.recorded.insert(run.recorded.end(), remaining, obs);
            run.flags.insert(run.flags.end(), remaining, StepFlag::Fail);
            return run;
        }
        if (spec.in_oss(obs)) {
            run.recorded.push_back(std::move(obs));
            run.flags.push_back(StepFlag::Ok);
        } else {
            run.recorded.push_back(run.recorded.back());
            run.flags.push_back(StepFlag::Held);
            ++run.held_steps;
        }
    }
    run.outcome = Outcome::Safe;
    return run;
}

ScenarioRun run_scenario(const SystemModel& sys, const OssSpec& spec, const StatePoint& s0, std::uint64_t seed) {
    Rng rng(seed);
    return run_scenario(sys, spec, s0, rng);
}

bool replay_check(const ScenarioRun& run, const SystemModel& sys, const OssSpec& spec, const StatePoint& s0,
                  std::uint64_t seed) {
    return run_scenario(sys, spec, s0, seed) == run;
}

}  // namespace safeset
