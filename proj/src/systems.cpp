#include "safeset/systems.hpp"

#include <algorithm>
#include <cmath>

#include "safeset/error.hpp"

namespace safeset {

namespace {

void expect_layout(const StatePoint& s, std::size_t cont, std::size_t disc, const char* system) {
    if (s.cont.size() != cont || s.disc.size() != disc) {
        throw DimensionError(std::string(system) + " expects " + std::to_string(cont) + " continuous and " +
                             std::to_string(disc) + " discrete coordinates");
    }
}

bool in_box(const std::vector<double>& x, const std::vector<double>& lo, const std::vector<double>& hi) {
    if (lo.empty()) {
        return false;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lo[i] && x[i] <= hi[i])) {
            return false;
        }
    }
    return true;
}

double draw_noise(double bound, Rng& rng) {
    return bound > 0.0 ? rng.uniform(-bound, bound) : 0.0;
}

}  // namespace

// Cliff integrator

void CliffIntegratorParams::validate() const {
    if (!(dt > 0.0)) {
        throw SpecError("cliff_integrator: dt must be positive");
    }
    if (!(noise >= 0.0)) {
        throw SpecError("cliff_integrator: noise bound must be non-negative");
    }
    if (!std::isfinite(cliff)) {
        throw SpecError("cliff_integrator: cliff must be finite");
    }
    if (!(v_min < v_max)) {
        throw SpecError("cliff_integrator: v_min must be below v_max");
    }
    if (!(brake >= 0.0)) {
        throw SpecError("cliff_integrator: brake must be non-negative");
    }
}

CliffIntegrator::CliffIntegrator(CliffIntegratorParams params) : params_(params) {
    params_.validate();
}

std::optional<RawState> CliffIntegrator::initialize(const StatePoint& s0, Rng&) const {
    expect_layout(s0, 2, 0, "cliff_integrator");
    return RawState{s0.cont[0], s0.cont[1]};
}

RawState CliffIntegrator::step(const RawState& raw, Rng& rng) const {
    double v = raw[1];
    const double slowdown = std::min(std::abs(v), params_.brake * params_.dt);
    v -= std::copysign(slowdown, v);
    v += draw_noise(params_.noise, rng);
    v = std::clamp(v, params_.v_min, params_.v_max);
    return RawState{raw[0] + v * params_.dt, v};
}

StatePoint CliffIntegrator::observe(const RawState& raw) const {
    return StatePoint{{raw[0], raw[1]}, {}};
}

bool CliffIntegrator::is_failure(const StatePoint& s) const {
    return s.cont[0] > params_.cliff;
}

// Drift walker

void DriftWalkerParams::validate() const {
    if (drift_knots.empty()) {
        throw SpecError("drift_walker: needs at least one drift knot");
    }
    for (std::size_t i = 1; i < drift_knots.size(); ++i) {
        if (!(drift_knots[i].first > drift_knots[i - 1].first)) {
            throw SpecError("drift_walker: drift knots must have increasing velocities");
        }
    }
    if (!(limit > 0.0)) {
        throw SpecError("drift_walker: lateral limit must be positive");
    }
    if (push_period < 1) {
        throw SpecError("drift_walker: push period must be at least one step");
    }
    if (!(retention >= 0.0 && retention <= 1.0)) {
        throw SpecError("drift_walker: retention must lie in [0, 1]");
    }
    if (!(noise >= 0.0)) {
        throw SpecError("drift_walker: noise bound must be non-negative");
    }
}

DriftWalkerParams DriftWalkerParams::mirrored() const {
    auto m = *this;
    for (auto& knot : m.drift_knots) {
        knot.second = -knot.second;
    }
    return m;
}

DriftWalker::DriftWalker(DriftWalkerParams params) : params_(std::move(params)) {
    params_.validate();
}

double DriftWalker::drift(double v) const {
    const auto& k = params_.drift_knots;
    if (v <= k.front().first) {
        return k.front().second;
    }
    if (v >= k.back().first) {
        return k.back().second;
    }
    const auto hi = std::upper_bound(k.begin(), k.end(), v,
                                     [](double x, const std::pair<double, double>& knot) { return x < knot.first; });
    const auto lo = hi - 1;
    const double w = (v - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

std::optional<RawState> DriftWalker::initialize(const StatePoint& s0, Rng&) const {
    expect_layout(s0, 4, 0, "drift_walker");
    return RawState{s0.cont[0], s0.cont[1], s0.cont[2], s0.cont[3], 0.0};
}

RawState DriftWalker::step(const RawState& raw, Rng& rng) const {
    const double v = raw[0];
    const double fx = raw[2];
    const double fy = raw[3];
    const double t = raw[4] + 1.0;
    const bool push = static_cast<std::int64_t>(t) % params_.push_period == 0;
    double kick = drift(v);
    if (push) {
        kick += params_.push_amplitude * fy * (1.0 + params_.sagittal_coupling * std::abs(fx));
    }
    kick += draw_noise(params_.noise, rng);
    return RawState{v, params_.retention * raw[1] + kick, fx, fy, t};
}

StatePoint DriftWalker::observe(const RawState& raw) const {
    return StatePoint{{raw[0], raw[1], raw[2], raw[3]}, {}};
}

bool DriftWalker::is_failure(const StatePoint& s) const {
    return std::abs(s.cont[1]) > params_.limit;
}

// Mode hopper

void ModeHopperParams::validate() const {
    if (modes.empty()) {
        throw SpecError("mode_hopper: needs at least one mode");
    }
    auto sorted = modes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw SpecError("mode_hopper: modes must be distinct");
    }
    if (gains.size() != modes.size()) {
        throw SpecError("mode_hopper: one gain per mode required");
    }
    if (!std::is_sorted(band_edges.begin(), band_edges.end())) {
        throw SpecError("mode_hopper: band edges must be ascending");
    }
    if (transitions.size() != modes.size()) {
        throw SpecError("mode_hopper: one transition row per mode required");
    }
    for (const auto& row : transitions) {
        if (row.size() != band_edges.size() + 1) {
            throw SpecError("mode_hopper: each transition row needs one entry per frequency band");
        }
        for (const auto target : row) {
            if (std::find(modes.begin(), modes.end(), target) == modes.end()) {
                throw SpecError("mode_hopper: transition into undeclared mode " + std::to_string(target));
            }
        }
    }
    if (!(failure_threshold > 0.0)) {
        throw SpecError("mode_hopper: failure threshold must be positive");
    }
    if (!(noise >= 0.0)) {
        throw SpecError("mode_hopper: noise bound must be non-negative");
    }
}

ModeHopper::ModeHopper(ModeHopperParams params) : params_(std::move(params)) {
    params_.validate();
}

std::size_t ModeHopper::mode_index(std::int64_t mode) const {
    const auto it = std::find(params_.modes.begin(), params_.modes.end(), mode);
    return static_cast<std::size_t>(it - params_.modes.begin());
}

std::optional<RawState> ModeHopper::initialize(const StatePoint& s0, Rng&) const {
    expect_layout(s0, 2, 1, "mode_hopper");
    if (mode_index(s0.disc[0]) == params_.modes.size() || std::abs(s0.cont[0]) > params_.init_limit) {
        return std::nullopt;
    }
    return RawState{s0.cont[0], s0.cont[1], static_cast<double>(s0.disc[0])};
}

RawState ModeHopper::step(const RawState& raw, Rng& rng) const {
    const double freq = raw[1];
    const auto band = static_cast<std::size_t>(
        std::upper_bound(params_.band_edges.begin(), params_.band_edges.end(), freq) - params_.band_edges.begin());
    const auto mode = params_.transitions[mode_index(static_cast<std::int64_t>(raw[2]))][band];
    const double x = params_.gains[mode_index(mode)] * raw[0] + params_.bias + draw_noise(params_.noise, rng);
    return RawState{x, freq, static_cast<double>(mode)};
}

StatePoint ModeHopper::observe(const RawState& raw) const {
    return StatePoint{{raw[0], raw[1]}, {static_cast<std::int64_t>(raw[2])}};
}

bool ModeHopper::is_failure(const StatePoint& s) const {
    return std::abs(s.cont[0]) > params_.failure_threshold;
}

// Hazard field

void HazardFieldParams::validate() const {
    if (region_lower.size() != region_upper.size()) {
        throw SpecError("hazard_field: region bounds differ in length");
    }
    if (refuse_lower.size() != refuse_upper.size()) {
        throw SpecError("hazard_field: refusal bounds differ in length");
    }
    if (!(fail_probability >= 0.0 && fail_probability <= 1.0)) {
        throw SpecError("hazard_field: fail probability must lie in [0, 1]");
    }
    if (!region_lower.empty() && sink.size() != region_lower.size()) {
        throw SpecError("hazard_field: a failure region needs a sink point of the same dimension");
    }
}

HazardField::HazardField(HazardFieldParams params) : params_(std::move(params)) {
    params_.validate();
}

std::optional<RawState> HazardField::initialize(const StatePoint& s0, Rng& rng) const {
    const auto n = s0.cont.size();
    auto check = [&](const std::vector<double>& v, const char* what) {
        if (!v.empty() && v.size() != n) {
            throw DimensionError(std::string("hazard_field: ") + what + " does not match the state dimension");
        }
    };
    check(params_.region_lower, "region");
    check(params_.refuse_lower, "refusal box");
    check(params_.drift, "drift");
    if (in_box(s0.cont, params_.refuse_lower, params_.refuse_upper)) {
        return std::nullopt;
    }
    bool doomed = false;
    if (in_box(s0.cont, params_.region_lower, params_.region_upper)) {
        if (params_.fail_probability >= 1.0) {
            doomed = true;
        } else if (params_.fail_probability > 0.0) {
            doomed = rng.uniform() < params_.fail_probability;
        }
    }
    RawState raw{static_cast<double>(n), static_cast<double>(s0.disc.size())};
    raw.insert(raw.end(), s0.cont.begin(), s0.cont.end());
    for (const auto q : s0.disc) {
        raw.push_back(static_cast<double>(q));
    }
    raw.push_back(doomed ? 1.0 : 0.0);
    return raw;
}

RawState HazardField::step(const RawState& raw, Rng&) const {
    auto next = raw;
    if (raw.back() != 0.0) {
        std::copy(params_.sink.begin(), params_.sink.end(), next.begin() + 2);
        return next;
    }
    for (std::size_t i = 0; i < params_.drift.size(); ++i) {
        next[2 + i] += params_.drift[i];
    }
    return next;
}

StatePoint HazardField::observe(const RawState& raw) const {
    const auto n = static_cast<std::size_t>(raw[0]);
    const auto m = static_cast<std::size_t>(raw[1]);
    StatePoint s;
    s.cont.assign(raw.begin() + 2, raw.begin() + 2 + static_cast<std::ptrdiff_t>(n));
    for (std::size_t j = 0; j < m; ++j) {
        s.disc.push_back(static_cast<std::int64_t>(raw[2 + n + j]));
    }
    return s;
}

bool HazardField::is_failure(const StatePoint& s) const {
    return !params_.sink.empty() && s.cont == params_.sink;
}

HazardFieldParams fixed_point_params() {
    return HazardFieldParams{};
}

}  // namespace safeset
