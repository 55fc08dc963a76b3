#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "safeset/scenario.hpp"

namespace safeset {

/// Point mass rolling toward a cliff edge.
///
/// OSS layout: (position, velocity). Each step brakes the velocity toward
/// zero by brake * dt, adds a uniform disturbance in [-noise, noise], clamps
/// it to [v_min, v_max] and advances position by velocity * dt. Failure is
/// position > cliff.
struct CliffIntegratorParams {
    double dt = 0.1;
    double noise = 0.0;
    double cliff = 1.0;
    double v_min = -std::numeric_limits<double>::infinity();
    double v_max = std::numeric_limits<double>::infinity();
    double brake = 0.0;

    void validate() const;
};

class CliffIntegrator final : public SystemModel {
public:
    explicit CliffIntegrator(CliffIntegratorParams params);

    std::optional<RawState> initialize(const StatePoint& s0, Rng& rng) const override;
    RawState step(const RawState& raw, Rng& rng) const override;
    StatePoint observe(const RawState& raw) const override;
    bool is_failure(const StatePoint& s) const override;

    const CliffIntegratorParams& params() const { return params_; }

private:
    CliffIntegratorParams params_;
};

/// Walker whose lateral offset drifts with forward speed and is kicked by a
/// periodic transverse push.
///
/// OSS layout: (velocity, lateral offset, sagittal force, transverse force).
/// Velocity and both forces are the commanded test condition and stay fixed
/// during a run. Each step the offset becomes
///   retention * y + drift(v) + push * amplitude * fy * (1 + coupling * |fx|) + noise,
/// where push is 1 on every push_period-th step. drift is piecewise linear
/// through the knots (v, drift) and constant beyond them. Failure is |y| > limit.
struct DriftWalkerParams {
    std::vector<std::pair<double, double>> drift_knots{{0.0, 0.0}};
    double limit = 1.0;
    double push_amplitude = 0.0;
    int push_period = 1;
    double sagittal_coupling = 0.0;
    double retention = 1.0;
    double noise = 0.0;

    void validate() const;

    /// Same walker reflected left-to-right: every drift value negated.
    DriftWalkerParams mirrored() const;
};

class DriftWalker final : public SystemModel {
public:
    explicit DriftWalker(DriftWalkerParams params);

    std::optional<RawState> initialize(const StatePoint& s0, Rng& rng) const override;
    RawState step(const RawState& raw, Rng& rng) const override;
    StatePoint observe(const RawState& raw) const override;
    bool is_failure(const StatePoint& s) const override;

    double drift(double v) const;

private:
    DriftWalkerParams params_;
};

/// Hybrid oscillator whose mode follows a commanded switching frequency.
///
/// OSS layout: continuous (x, frequency), discrete (mode). Each step the mode
/// moves to transitions[mode][band(frequency)], where the bands are cut by
/// band_edges, then x becomes gain[mode] * x + bias + uniform noise. Modes
/// declared here but not in the OSS are reachable but unobservable inside it.
/// Failure is |x| > failure_threshold. Initialization is refused for
/// |x| > init_limit.
struct ModeHopperParams {
    std::vector<std::int64_t> modes{0};
    std::vector<double> gains{0.5};
    std::vector<double> band_edges;
    std::vector<std::vector<std::int64_t>> transitions{{0}};
    double bias = 0.0;
    double noise = 0.0;
    double failure_threshold = 1.0;
    double init_limit = std::numeric_limits<double>::infinity();

    /// Throws SpecError, e.g. for a transition into an undeclared mode.
    void validate() const;
};

class ModeHopper final : public SystemModel {
public:
    explicit ModeHopper(ModeHopperParams params);

    std::optional<RawState> initialize(const StatePoint& s0, Rng& rng) const override;
    RawState step(const RawState& raw, Rng& rng) const override;
    StatePoint observe(const RawState& raw) const override;
    bool is_failure(const StatePoint& s) const override;

private:
    std::size_t mode_index(std::int64_t mode) const;

    ModeHopperParams params_;
};

/// Field with a marked failure region, for exercising pruning and validation.
///
/// The state drifts by a constant velocity per step (zero keeps it fixed). A
/// run started inside the box [region_lower, region_upper] is doomed with
/// probability fail_probability, drawn once at initialization; a doomed run
/// jumps to the sink point on its first step. The sink is the only failure
/// state. Initialization is refused inside [refuse_lower, refuse_upper].
/// Empty region vectors disable the region.
struct HazardFieldParams {
    std::vector<double> region_lower;
    std::vector<double> region_upper;
    double fail_probability = 1.0;
    std::vector<double> sink;
    std::vector<double> drift;
    std::vector<double> refuse_lower;
    std::vector<double> refuse_upper;

    void validate() const;
};

class HazardField final : public SystemModel {
public:
    explicit HazardField(HazardFieldParams params);

    std::optional<RawState> initialize(const StatePoint& s0, Rng& rng) const override;
    RawState step(const RawState& raw, Rng& rng) const override;
    StatePoint observe(const RawState& raw) const override;
    bool is_failure(const StatePoint& s) const override;

private:
    HazardFieldParams params_;
};

/// Every state is a safe fixed point.
HazardFieldParams fixed_point_params();

}  // namespace safeset
