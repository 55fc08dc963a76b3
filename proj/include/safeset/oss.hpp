#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace safeset {

/// One observed system state: continuous coordinates plus integer-coded modes.
struct StatePoint {
    std::vector<double> cont;
    std::vector<std::int64_t> disc;

    friend bool operator==(const StatePoint&, const StatePoint&) = default;
};

struct ContinuousDim {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;

    friend bool operator==(const ContinuousDim&, const ContinuousDim&) = default;
};

struct DiscreteDim {
    std::string name;
    std::vector<std::int64_t> values;

    /// Position of v in the ascending order of the declared values, or -1.
    std::int64_t rank(std::int64_t v) const;

    friend bool operator==(const DiscreteDim&, const DiscreteDim&) = default;
};

/// Per-continuous-dimension half width of a covering box. Modes are matched
/// exactly and carry no entry.
using DeltaVector = std::vector<double>;

/// The operational state space: a box over the continuous dimensions times a
/// finite product of mode sets, the covering resolution and the run horizon.
struct OssSpec {
    std::vector<ContinuousDim> cont_dims;
    std::vector<DiscreteDim> disc_dims;
    DeltaVector delta;
    int horizon = 1;

    /// Throws SpecError when a bound, mode set, delta or the horizon is invalid.
    void validate() const;

    /// Throws DimensionError unless p has one coordinate per declared dimension.
    void check_dims(const StatePoint& p) const;

    /// Inside the continuous box (bounds inclusive) with every mode declared.
    bool in_oss(const StatePoint& p) const;

    /// Number of grid cells along continuous dimension i.
    std::int64_t cell_count(std::size_t i) const;

    /// Total lattice size; saturates at SIZE_MAX.
    std::size_t grid_size() const;

    /// Dimension names in CSV column order: continuous first, then discrete.
    std::vector<std::string> dim_names() const;

    friend bool operator==(const OssSpec&, const OssSpec&) = default;
};

/// Integer cell coordinates: one cell index per continuous dimension followed
/// by the mode values.
using CellKey = std::vector<std::int64_t>;
using CellSet = std::set<CellKey>;

/// Lattice cell containing x along continuous dimension i. Points on a cell
/// boundary belong to the lower cell; indices are clamped to the grid.
std::int64_t cell_index(const OssSpec& spec, std::size_t i, double x);

/// Centroid coordinate of cell k along continuous dimension i: lower + delta +
/// 2 delta k, pulled back onto the upper bound for an overhanging last cell.
double cell_center(const OssSpec& spec, std::size_t i, std::int64_t k);

CellKey cell_of(const OssSpec& spec, const StatePoint& p);
StatePoint centroid_of(const OssSpec& spec, const CellKey& key);

/// Grid-aligned centroid of the cell containing p. Throws SpecError when p is
/// outside the OSS.
StatePoint snap_to_cell(const OssSpec& spec, const StatePoint& p);

/// Maps every coordinate to [0, 1]: continuous by the declared range, modes by
/// rank / (size - 1), with singleton mode sets mapped to 0.
std::vector<double> normalize(const OssSpec& spec, const StatePoint& p);

/// Index of the candidate nearest to p in normalized l2 distance; the earliest
/// candidate wins ties.
std::size_t nearest_normalized(const OssSpec& spec, std::span<const StatePoint> candidates, const StatePoint& p);

/// Whether p lies in the delta box around c (modes equal, |dx_i| <= delta_i).
bool in_box(const OssSpec& spec, const StatePoint& c, const StatePoint& p);

struct CentroidId {
    std::uint64_t value = 0;

    friend auto operator<=>(const CentroidId&, const CentroidId&) = default;
};

inline constexpr std::size_t kDefaultCapacity = 10'000'000;

/// The centroid set Phi_c; the union of the delta boxes around its members is
/// the covering set Phi_delta. Every centroid sits on the lattice, at most one
/// per cell, and ids are never reused.
class CoveringSet {
public:
    explicit CoveringSet(OssSpec spec, std::size_t capacity = kDefaultCapacity);

    const OssSpec& spec() const { return spec_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return order_.size(); }
    bool empty() const { return order_.empty(); }

    /// Live ids in ascending order.
    std::span<const CentroidId> ids() const { return order_; }

    bool has(CentroidId id) const { return entries_.count(id) != 0; }
    const StatePoint& centroid(CentroidId id) const;
    const CellKey& cell(CentroidId id) const;
    std::optional<CentroidId> find_cell(const CellKey& key) const;

    /// Adds the lattice centroid of p's cell under a fresh id. Returns the
    /// existing id and false when the cell is already occupied.
    std::pair<CentroidId, bool> insert(const StatePoint& p);

    /// Re-creates a centroid under a known id (used when loading a saved set).
    void insert_with_id(CentroidId id, const StatePoint& p);

    void erase(CentroidId id);

    /// Membership in Phi_delta.
    bool contains(const StatePoint& p) const;

    /// Every centroid whose box contains p, ascending.
    std::vector<CentroidId> covering(const StatePoint& p) const;

    /// Nearest centroid in normalized l2 distance; ties go to the smallest id.
    CentroidId norm_nearest(const StatePoint& p) const;

    CellSet cells() const;

    std::uint64_t next_id() const { return next_id_; }

private:
    struct Entry {
        StatePoint point;
        CellKey cell;
        std::vector<double> normalized;
    };

    template <typename Visit>
    void for_each_covering(const StatePoint& p, Visit&& visit) const;

    OssSpec spec_;
    std::size_t capacity_;
    std::map<CentroidId, Entry> entries_;
    std::map<CellKey, CentroidId> index_;
    std::vector<CentroidId> order_;
    std::uint64_t next_id_ = 0;
};

/// Full lattice over the OSS, ids assigned in cell order (last dimension
/// fastest). Throws CapacityError when the lattice exceeds the limit.
CoveringSet build_initial_covering(const OssSpec& spec, std::size_t capacity = kDefaultCapacity);

/// |intersection| / |union| over at least two sets. Throws EmptySetError when
/// every set is empty.
double iou(std::span<const CellSet> sets);

/// Same over covering sets; throws GridMismatchError unless all share one OSS.
double iou(std::span<const CoveringSet* const> sets);

}  // namespace safeset
