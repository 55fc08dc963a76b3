#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "safeset/oss.hpp"
#include "safeset/rng.hpp"
#include "safeset/scenario.hpp"

namespace safeset {

/// Smallest N with N >= ln(beta) / ln(1 - epsilon): the number of consecutive
/// contained, failure-free runs that bound the failure probability of the set
/// by epsilon with confidence 1 - beta. Zero when beta = 1 or epsilon = 1. Throws
/// DomainError outside (0, 1].
std::size_t sample_count(double epsilon, double beta);

/// Directed graph over centroid ids without self-loops or parallel edges.
class TransitionGraph {
public:
    bool add_vertex(CentroidId v);
    bool has_vertex(CentroidId v) const { return out_.count(v) != 0; }

    /// Returns false for a duplicate edge or a self-loop. Both endpoints must be vertices.
    bool add_edge(CentroidId from, CentroidId to);
    bool has_edge(CentroidId from, CentroidId to) const;

    /// Drops v and every incident edge.
    void remove_vertex(CentroidId v);

    /// Every vertex from which one of targets can be reached along edge
    /// direction, targets included. Depth-first over reversed edges; targets
    /// that are not vertices are ignored. Ascending.
    std::vector<CentroidId> ancestors(std::span<const CentroidId> targets) const;

    const std::set<CentroidId>& successors(CentroidId v) const;

    std::size_t vertex_count() const { return out_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::vector<CentroidId> vertices() const;
    std::vector<std::pair<CentroidId, CentroidId>> edges() const;

private:
    std::map<CentroidId, std::set<CentroidId>> out_;
    std::map<CentroidId, std::set<CentroidId>> in_;
    std::size_t edge_count_ = 0;
};

/// Last-in first-out store of states taken from failing runs.
class ReplayBuffer {
public:
    void push(StatePoint s) { items_.push_back(std::move(s)); }
    StatePoint pop();
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    std::span<const StatePoint> items() const { return items_; }

private:
    std::vector<StatePoint> items_;
};

enum class InitDistribution { Uniform };

struct QuantifyConfig {
    double epsilon = 0.05;
    double beta = 0.001;
    std::uint64_t seed = 0;
    std::size_t max_runs = 100'000;
    InitDistribution init_distribution = InitDistribution::Uniform;
    std::size_t capacity = kDefaultCapacity;

    /// Throws DomainError for epsilon or beta outside (0, 1] and Error when
    /// max_runs cannot reach sample_count(epsilon, beta).
    void validate() const;
};

enum class Verdict { Certified, BudgetExhausted };

enum class PickSource { Uniform, Replay };

const char* to_string(Verdict verdict);
const char* to_string(PickSource source);

/// One line of the run log.
struct RunRecord {
    std::size_t run_index = 0;
    std::uint64_t run_seed = 0;
    CentroidId s0_id;
    StatePoint s0;
    PickSource source = PickSource::Uniform;
    Outcome outcome = Outcome::Safe;
    int steps_to_failure = -1;
    int held_steps = 0;
    std::size_t centroids_added = 0;
    std::size_t centroids_removed = 0;
    std::size_t buffer_len_after = 0;
    std::size_t n_after = 0;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct CampaignCounters {
    std::size_t total_runs = 0;
    std::size_t failure_runs = 0;
    std::size_t init_failure_runs = 0;
    std::size_t pruned_centroids = 0;
    std::size_t added_centroids = 0;
    std::size_t initial_size = 0;
    std::size_t final_size = 0;
    std::size_t final_n = 0;
};

struct CampaignReport {
    CoveringSet final_set;
    Verdict verdict = Verdict::BudgetExhausted;
    CampaignCounters counters;
    QuantifyConfig config;
    std::size_t target = 0;
    /// Certified because every centroid was pruned.
    bool vacuous = false;
    std::vector<RunRecord> log;
};

/// Pruned centroids with the safe-graph edges that ran between them, plus the
/// observed transitions of failing runs.
struct UnsafeGraph {
    TransitionGraph graph;
    std::vector<std::pair<StatePoint, StatePoint>> transitions;
};

/// State of the quantification loop: the candidate centroid set, the safe and
/// unsafe transition graphs, the replay buffer and the consecutive-safe count.
class Quantifier {
public:
    Quantifier(CoveringSet initial, QuantifyConfig cfg);

    /// Uniform over the current centroids when the buffer is empty, otherwise
    /// the centroid norm-nearest to the most recently buffered state.
    CentroidId pick_initial(Rng& rng);

    /// Buffers every state up to the failure, prunes the centroids whose boxes
    /// hold them together with their safe-graph ancestors, and resets the
    /// count. Returns the number of centroids removed.
    std::size_t process_failure(const ScenarioRun& run);

    /// Extends the covering with the cell of each uncovered state, chaining
    /// safe-graph edges from the initial centroid, then advances or resets
    /// the count. Returns the number of centroids added.
    std::size_t process_safe(const ScenarioRun& run, CentroidId initial);

    /// Drops a centroid the system refused to start from.
    void process_init_failure(CentroidId id);

    /// One pick-run-update iteration against sys.
    RunRecord step(const SystemModel& sys);

    const CoveringSet& covering() const { return covering_; }
    const TransitionGraph& safe_graph() const { return safe_; }
    const UnsafeGraph& unsafe_graph() const { return unsafe_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    std::size_t consecutive_safe() const { return n_; }
    const CampaignCounters& counters() const { return counters_; }
    const QuantifyConfig& config() const { return cfg_; }
    std::size_t target() const { return target_; }

    CampaignReport into_report(Verdict verdict, bool vacuous, std::vector<RunRecord> log) &&;

private:
    void remove_to_unsafe(std::span<const CentroidId> ids);

    CoveringSet covering_;
    QuantifyConfig cfg_;
    std::size_t target_;
    TransitionGraph safe_;
    UnsafeGraph unsafe_;
    ReplayBuffer buffer_;
    std::size_t n_ = 0;
    Rng rng_;
    CampaignCounters counters_;
};

/// Runs the quantification loop from the full lattice over spec until the
/// consecutive-safe count reaches sample_count (Certified), every centroid is
/// pruned (Certified, vacuous) or max_runs runs were spent (BudgetExhausted).
CampaignReport quantify(const SystemModel& sys, const OssSpec& spec, const QuantifyConfig& cfg);

/// Same loop from a caller-supplied initial covering.
CampaignReport quantify(const SystemModel& sys, CoveringSet initial, const QuantifyConfig& cfg);

struct AuditResult {
    bool ok = true;
    std::string message;
};

/// Replays the consecutive-safe counter over a run log: a run that is safe,
/// adds nothing and leaves the buffer empty increments it, anything else
/// resets it. Checks every recorded count, that the loop stopped the moment
/// the count reached target, and that a non-vacuous Certified verdict ends
/// on exactly target qualifying runs.
AuditResult audit_run_log(std::span<const RunRecord> log, Verdict verdict, std::size_t target, bool vacuous);

}  // namespace safeset
