#include "safeset/quantify.hpp"

#include <algorithm>
#include <cmath>

#include "safeset/error.hpp"

namespace safeset {

namespace {

void check_unit_interval(double value, const char* name) {
    if (!(value > 0.0 && value <= 1.0)) {
        throw DomainError(std::string(name) + " must lie in (0, 1]");
    }
}

}  // namespace

std::size_t sample_count(double epsilon, double beta) {
    check_unit_interval(epsilon, "epsilon");
    check_unit_interval(beta, "beta");
    if (beta == 1.0 || epsilon == 1.0) {
        return 0;
    }
    const double ratio = std::log(beta) / std::log1p(-epsilon);
    // Absorb rounding noise when the ratio is an exact integer.
    return static_cast<std::size_t>(std::ceil(ratio - 1e-9 * ratio));
}

bool TransitionGraph::add_vertex(CentroidId v) {
    if (has_vertex(v)) {
        return false;
    }
    out_.emplace(v, std::set<CentroidId>{});
    in_.emplace(v, std::set<CentroidId>{});
    return true;
}

bool TransitionGraph::add_edge(CentroidId from, CentroidId to) {
    if (!has_vertex(from) || !has_vertex(to)) {
        throw Error("edge endpoint is not a graph vertex");
    }
    if (from == to || !out_[from].insert(to).second) {
        return false;
    }
    in_[to].insert(from);
    ++edge_count_;
    return true;
}

bool TransitionGraph::has_edge(CentroidId from, CentroidId to) const {
    const auto it = out_.find(from);
    return it != out_.end() && it->second.count(to) != 0;
}

void TransitionGraph::remove_vertex(CentroidId v) {
    const auto out = out_.find(v);
    if (out == out_.end()) {
        return;
    }
    for (const auto w : out->second) {
        in_[w].erase(v);
        --edge_count_;
    }
    for (const auto u : in_[v]) {
        out_[u].erase(v);
        --edge_count_;
    }
    out_.erase(out);
    in_.erase(v);
}

std::vector<CentroidId> TransitionGraph::ancestors(std::span<const CentroidId> targets) const {
    std::set<CentroidId> seen;
    std::vector<CentroidId> stack;
    for (const auto t : targets) {
        if (has_vertex(t) && seen.insert(t).second) {
            stack.push_back(t);
        }
    }
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (const auto u : in_.at(v)) {
            if (seen.insert(u).second) {
                stack.push_back(u);
            }
        }
    }
    return {seen.begin(), seen.end()};
}

const std::set<CentroidId>& TransitionGraph::successors(CentroidId v) const {
    const auto it = out_.find(v);
    if (it == out_.end()) {
        throw Error("unknown graph vertex " + std::to_string(v.value));
    }
    return it->second;
}

std::vector<CentroidId> TransitionGraph::vertices() const {
    std::vector<CentroidId> vs;
    vs.reserve(out_.size());
    for (const auto& [v, _] : out_) {
        vs.push_back(v);
    }
    return vs;
}

std::vector<std::pair<CentroidId, CentroidId>> TransitionGraph::edges() const {
    std::vector<std::pair<CentroidId, CentroidId>> es;
    for (const auto& [u, outs] : out_) {
        for (const auto v : outs) {
            es.emplace_back(u, v);
        }
    }
    return es;
}

StatePoint ReplayBuffer::pop() {
    if (items_.empty()) {
        throw EmptySetError("pop from an empty replay buffer");
    }
    auto s = std::move(items_.back());
    items_.pop_back();
    return s;
}

void QuantifyConfig::validate() const {
    const auto needed = sample_count(epsilon, beta);
    if (max_runs < needed) {
        throw Error("max_runs = " + std::to_string(max_runs) + " is below the " + std::to_string(needed) +
                    " runs needed to certify");
    }
}

const char* to_string(Verdict verdict) {
    return verdict == Verdict::Certified ? "certified" : "budget_exhausted";
}

const char* to_string(PickSource source) {
    return source == PickSource::Uniform ? "uniform" : "replay";
}

Quantifier::Quantifier(CoveringSet initial, QuantifyConfig cfg)
    : covering_(std::move(initial)), cfg_(cfg), target_(0), rng_(cfg.seed) {
    cfg_.validate();
    target_ = sample_count(cfg_.epsilon, cfg_.beta);
    for (const auto id : covering_.ids()) {
        safe_.add_vertex(id);
    }
    counters_.initial_size = covering_.size();
    counters_.final_size = covering_.size();
}

CentroidId Quantifier::pick_initial(Rng& rng) {
    if (covering_.empty()) {
        throw EmptySetError("no centroid left to start a scenario from");
    }
    if (buffer_.empty()) {
        return covering_.ids()[rng.index(covering_.size())];
    }
    return covering_.norm_nearest(buffer_.pop());
}

void Quantifier::remove_to_unsafe(std::span<const CentroidId> ids) {
    const std::set<CentroidId> moving(ids.begin(), ids.end());
    for (const auto id : ids) {
        unsafe_.graph.add_vertex(id);
    }
    for (const auto id : ids) {
        for (const auto succ : safe_.successors(id)) {
            if (moving.count(succ) != 0) {
                unsafe_.graph.add_edge(id, succ);
            }
        }
    }
    for (const auto id : ids) {
        safe_.remove_vertex(id);
        covering_.erase(id);
    }
}

std::size_t Quantifier::process_failure(const ScenarioRun& run) {
    if (run.outcome != Outcome::Failure) {
        throw Error("process_failure needs a failing run");
    }
    const auto last = static_cast<std::size_t>(run.failure_step);
    std::size_t removed = 0;
    for (std::size_t i = 0; i <= last; ++i) {
        const auto& state = run.recorded[i];
        buffer_.push(state);
        const auto hit = covering_.covering(state);
        if (!hit.empty()) {
            const auto doomed = safe_.ancestors(hit);
            remove_to_unsafe(doomed);
            removed += doomed.size();
        }
        if (i < last) {
            unsafe_.transitions.emplace_back(state, run.recorded[i + 1]);
        }
    }
    n_ = 0;
    counters_.pruned_centroids += removed;
    counters_.final_size = covering_.size();
    return removed;
}

std::size_t Quantifier::process_safe(const ScenarioRun& run, CentroidId initial) {
    if (run.outcome != Outcome::Safe) {
        throw Error("process_safe needs a safe run");
    }
    CentroidId cursor = initial;
    std::size_t added = 0;
    for (std::size_t i = 1; i < run.recorded.size(); ++i) {
        const auto& state = run.recorded[i];
        if (covering_.contains(state)) {
            continue;
        }
        const auto [id, inserted] = covering_.insert(state);
        if (inserted) {
            ++added;
            safe_.add_vertex(id);
        }
        if (safe_.has_vertex(cursor)) {
            safe_.add_edge(cursor, id);
        }
        cursor = id;
    }
    if (added == 0 && buffer_.empty()) {
        ++n_;
    } else {
        n_ = 0;
    }
    counters_.added_centroids += added;
    counters_.final_size = covering_.size();
    return added;
}

void Quantifier::process_init_failure(CentroidId id) {
    safe_.remove_vertex(id);
    covering_.erase(id);
    n_ = 0;
    counters_.final_size = covering_.size();
}

RunRecord Quantifier::step(const SystemModel& sys) {
    RunRecord rec;
    rec.run_index = counters_.total_runs;
    rec.run_seed = derive_seed(cfg_.seed, rec.run_index);
    rec.source = buffer_.empty() ? PickSource::Uniform : PickSource::Replay;
    rec.s0_id = pick_initial(rng_);
    rec.s0 = covering_.centroid(rec.s0_id);

    const auto run = run_scenario(sys, covering_.spec(), rec.s0, rec.run_seed);
    ++counters_.total_runs;
    rec.outcome = run.outcome;
    rec.held_steps = run.held_steps;
    switch (run.outcome) {
        case Outcome::InitFailed:
            process_init_failure(rec.s0_id);
            ++counters_.init_failure_runs;
            rec.centroids_removed = 1;
            break;
        case Outcome::Failure:
            ++counters_.failure_runs;
            rec.steps_to_failure = run.failure_step;
            rec.centroids_removed = process_failure(run);
            break;
        case Outcome::Safe:
            rec.centroids_added = process_safe(run, rec.s0_id);
            break;
    }
    rec.buffer_len_after = buffer_.size();
    rec.n_after = n_;
    counters_.final_n = n_;
    return rec;
}

CampaignReport Quantifier::into_report(Verdict verdict, bool vacuous, std::vector<RunRecord> log) && {
    counters_.final_n = n_;
    counters_.final_size = covering_.size();
    return CampaignReport{std::move(covering_), verdict, counters_, cfg_, target_, vacuous, std::move(log)};
}

CampaignReport quantify(const SystemModel& sys, CoveringSet initial, const QuantifyConfig& cfg) {
    Quantifier q(std::move(initial), cfg);
    std::vector<RunRecord> log;
    while (true) {
        if (q.consecutive_safe() >= q.target()) {
            return std::move(q).into_report(Verdict::Certified, false, std::move(log));
        }
        if (q.covering().empty()) {
            return std::move(q).into_report(Verdict::Certified, true, std::move(log));
        }
        if (q.counters().total_runs >= cfg.max_runs) {
            return std::move(q).into_report(Verdict::BudgetExhausted, false, std::move(log));
        }
        log.push_back(q.step(sys));
    }
}

CampaignReport quantify(const SystemModel& sys, const OssSpec& spec, const QuantifyConfig& cfg) {
    cfg.validate();
    return quantify(sys, build_initial_covering(spec, cfg.capacity), cfg);
}

AuditResult audit_run_log(std::span<const RunRecord> log, Verdict verdict, std::size_t target, bool vacuous) {
    auto fail = [](std::size_t i, const std::string& what) {
        return AuditResult{false, "run " + std::to_string(i) + ": " + what};
    };
    std::size_t n = 0;
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto& rec = log[i];
        if (rec.run_index != i) {
            return fail(i, "run index out of sequence");
        }
        if (n >= target) {
            return fail(i, "executed after the count had already reached " + std::to_string(target));
        }
        const bool qualifies =
            rec.outcome == Outcome::Safe && rec.centroids_added == 0 && rec.buffer_len_after == 0;
        n = qualifies ? n + 1 : 0;
        if (rec.outcome == Outcome::Failure && rec.n_after != 0) {
            return fail(i, "failure did not reset the count");
        }
        if (rec.n_after != n) {
            return fail(i, "logged count " + std::to_string(rec.n_after) + ", expected " + std::to_string(n));
        }
    }
    if (verdict == Verdict::Certified && !vacuous && n != target) {
        return AuditResult{false, "certified after " + std::to_string(n) + " qualifying runs, needed exactly " +
                                      std::to_string(target)};
    }
    if (verdict == Verdict::BudgetExhausted && n >= target) {
        return AuditResult{false, "budget verdict although the count reached the target"};
    }
    return {};
}

}  // namespace safeset
