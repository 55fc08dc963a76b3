#include "safeset/oss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "safeset/error.hpp"

namespace safeset {

namespace {

// Relative slack for lattice arithmetic: a point within this fraction of a
// cell of a boundary is treated as sitting on it.
constexpr double kLatticeTol = 1e-9;

std::vector<std::int64_t> sorted_values(const DiscreteDim& dim) {
    auto values = dim.values;
    std::sort(values.begin(), values.end());
    return values;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        d2 += diff * diff;
    }
    return d2;
}

}  // namespace

std::int64_t DiscreteDim::rank(std::int64_t v) const {
    const auto values = sorted_values(*this);
    const auto it = std::lower_bound(values.begin(), values.end(), v);
    if (it == values.end() || *it != v) {
        return -1;
    }
    return it - values.begin();
}

void OssSpec::validate() const {
    if (cont_dims.empty() && disc_dims.empty()) {
        throw SpecError("OSS declares no dimensions");
    }
    if (delta.size() != cont_dims.size()) {
        throw SpecError("delta has " + std::to_string(delta.size()) + " entries for " +
                        std::to_string(cont_dims.size()) + " continuous dimensions");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < cont_dims.size(); ++i) {
        const auto& d = cont_dims[i];
        if (!std::isfinite(d.lower) || !std::isfinite(d.upper) || !(d.lower < d.upper)) {
            throw SpecError("dimension '" + d.name + "' needs finite lower < upper");
        }
        if (!std::isfinite(delta[i]) || !(delta[i] > 0.0)) {
            throw SpecError("delta for '" + d.name + "' must be positive");
        }
        if (!names.insert(d.name).second) {
            throw SpecError("duplicate dimension name '" + d.name + "'");
        }
    }
    for (const auto& d : disc_dims) {
        if (d.values.empty()) {
            throw SpecError("mode dimension '" + d.name + "' has no values");
        }
        const auto values = sorted_values(d);
        if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
            throw SpecError("mode dimension '" + d.name + "' repeats a value");
        }
        if (!names.insert(d.name).second) {
            throw SpecError("duplicate dimension name '" + d.name + "'");
        }
    }
    for (const auto& name : names) {
        if (name.empty() || name.find_first_of(",\n\r\"") != std::string::npos) {
            throw SpecError("dimension names must be non-empty and free of commas, quotes, newlines");
        }
    }
    if (horizon < 1) {
        throw SpecError("horizon must be a positive number of steps");
    }
}

void OssSpec::check_dims(const StatePoint& p) const {
    if (p.cont.size() != cont_dims.size() || p.disc.size() != disc_dims.size()) {
        throw DimensionError("state has " + std::to_string(p.cont.size()) + "+" +
                             std::to_string(p.disc.size()) + " coordinates, OSS declares " +
                             std::to_string(cont_dims.size()) + "+" + std::to_string(disc_dims.size()));
    }
}

bool OssSpec::in_oss(const StatePoint& p) const {
    check_dims(p);
    for (std::size_t i = 0; i < cont_dims.size(); ++i) {
        const double x = p.cont[i];
        if (!(x >= cont_dims[i].lower && x <= cont_dims[i].upper)) {
            return false;
        }
    }
    for (std::size_t j = 0; j < disc_dims.size(); ++j) {
        if (disc_dims[j].rank(p.disc[j]) < 0) {
            return false;
        }
    }
    return true;
}

std::int64_t OssSpec::cell_count(std::size_t i) const {
    const double r = (cont_dims[i].upper - cont_dims[i].lower) / (2.0 * delta[i]);
    const double n = std::ceil(r - kLatticeTol * std::max(1.0, r));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(n));
}

std::size_t OssSpec::grid_size() const {
    constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
    std::size_t total = 1;
    auto mul = [&](std::size_t n) {
        if (n != 0 && total > kMax / n) {
            total = kMax;
        } else {
            total *= n;
        }
    };
    for (std::size_t i = 0; i < cont_dims.size(); ++i) {
        mul(static_cast<std::size_t>(cell_count(i)));
    }
    for (const auto& d : disc_dims) {
        mul(d.values.size());
    }
    return total;
}

std::vector<std::string> OssSpec::dim_names() const {
    std::vector<std::string> names;
    for (const auto& d : cont_dims) {
        names.push_back(d.name);
    }
    for (const auto& d : disc_dims) {
        names.push_back(d.name);
    }
    return names;
}

std::int64_t cell_index(const OssSpec& spec, std::size_t i, double x) {
    const double t = (x - spec.cont_dims[i].lower) / (2.0 * spec.delta[i]);
    const auto k = static_cast<std::int64_t>(std::ceil(t - kLatticeTol * std::max(1.0, std::abs(t)))) - 1;
    return std::clamp<std::int64_t>(k, 0, spec.cell_count(i) - 1);
}

double cell_center(const OssSpec& spec, std::size_t i, std::int64_t k) {
    const double d = spec.delta[i];
    return std::min(spec.cont_dims[i].lower + d + 2.0 * d * static_cast<double>(k), spec.cont_dims[i].upper);
}

CellKey cell_of(const OssSpec& spec, const StatePoint& p) {
    spec.check_dims(p);
    CellKey key;
    key.reserve(p.cont.size() + p.disc.size());
    for (std::size_t i = 0; i < p.cont.size(); ++i) {
        key.push_back(cell_index(spec, i, p.cont[i]));
    }
    key.insert(key.end(), p.disc.begin(), p.disc.end());
    return key;
}

StatePoint centroid_of(const OssSpec& spec, const CellKey& key) {
    const std::size_t n = spec.cont_dims.size();
    if (key.size() != n + spec.disc_dims.size()) {
        throw DimensionError("cell key length does not match the OSS");
    }
    StatePoint c;
    for (std::size_t i = 0; i < n; ++i) {
        c.cont.push_back(cell_center(spec, i, key[i]));
    }
    c.disc.assign(key.begin() + static_cast<std::ptrdiff_t>(n), key.end());
    return c;
}

StatePoint snap_to_cell(const OssSpec& spec, const StatePoint& p) {
    if (!spec.in_oss(p)) {
        throw SpecError("cannot snap a state outside the OSS");
    }
    return centroid_of(spec, cell_of(spec, p));
}

std::vector<double> normalize(const OssSpec& spec, const StatePoint& p) {
    spec.check_dims(p);
    std::vector<double> out;
    out.reserve(p.cont.size() + p.disc.size());
    for (std::size_t i = 0; i < p.cont.size(); ++i) {
        const auto& d = spec.cont_dims[i];
        out.push_back((p.cont[i] - d.lower) / (d.upper - d.lower));
    }
    for (std::size_t j = 0; j < p.disc.size(); ++j) {
        const auto values = sorted_values(spec.disc_dims[j]);
        if (values.size() == 1) {
            out.push_back(0.0);
            continue;
        }
        // Undeclared modes (failure states) take the position of the next
        // declared value.
        auto pos = std::lower_bound(values.begin(), values.end(), p.disc[j]) - values.begin();
        pos = std::min<std::ptrdiff_t>(pos, static_cast<std::ptrdiff_t>(values.size()) - 1);
        out.push_back(static_cast<double>(pos) / static_cast<double>(values.size() - 1));
    }
    return out;
}

bool in_box(const OssSpec& spec, const StatePoint& c, const StatePoint& p) {
    if (c.disc != p.disc) {
        return false;
    }
    for (std::size_t i = 0; i < c.cont.size(); ++i) {
        if (!(std::abs(p.cont[i] - c.cont[i]) <= spec.delta[i] * (1.0 + kLatticeTol))) {
            return false;
        }
    }
    return true;
}

CoveringSet::CoveringSet(OssSpec spec, std::size_t capacity) : spec_(std::move(spec)), capacity_(capacity) {
    spec_.validate();
}

const StatePoint& CoveringSet::centroid(CentroidId id) const {
    const auto it = entries_.find(id);
    if (it == entries_.end()) {
        throw Error("unknown centroid id " + std::to_string(id.value));
    }
    return it->second.point;
}

const CellKey& CoveringSet::cell(CentroidId id) const {
    const auto it = entries_.find(id);
    if (it == entries_.end()) {
        throw Error("unknown centroid id " + std::to_string(id.value));
    }
    return it->second.cell;
}

std::optional<CentroidId> CoveringSet::find_cell(const CellKey& key) const {
    const auto it = index_.find(key);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::pair<CentroidId, bool> CoveringSet::insert(const StatePoint& p) {
    if (!spec_.in_oss(p)) {
        throw SpecError("cannot add a centroid outside the OSS");
    }
    auto key = cell_of(spec_, p);
    if (const auto existing = find_cell(key)) {
        return {*existing, false};
    }
    if (size() >= capacity_) {
        throw CapacityError("covering set reached its capacity of " + std::to_string(capacity_) + " centroids");
    }
    const CentroidId id{next_id_++};
    auto point = centroid_of(spec_, key);
    auto normalized = normalize(spec_, point);
    index_.emplace(key, id);
    entries_.emplace(id, Entry{std::move(point), std::move(key), std::move(normalized)});
    order_.push_back(id);
    return {id, true};
}

void CoveringSet::insert_with_id(CentroidId id, const StatePoint& p) {
    if (has(id)) {
        throw Error("duplicate centroid id " + std::to_string(id.value));
    }
    if (!spec_.in_oss(p)) {
        throw SpecError("centroid " + std::to_string(id.value) + " lies outside the OSS");
    }
    auto key = cell_of(spec_, p);
    if (find_cell(key)) {
        throw Error("two centroids share one grid cell (id " + std::to_string(id.value) + ")");
    }
    if (size() >= capacity_) {
        throw CapacityError("covering set reached its capacity of " + std::to_string(capacity_) + " centroids");
    }
    auto point = centroid_of(spec_, key);
    auto normalized = normalize(spec_, point);
    index_.emplace(key, id);
    entries_.emplace(id, Entry{std::move(point), std::move(key), std::move(normalized)});
    order_.insert(std::upper_bound(order_.begin(), order_.end(), id), id);
    next_id_ = std::max(next_id_, id.value + 1);
}

void CoveringSet::erase(CentroidId id) {
    const auto it = entries_.find(id);
    if (it == entries_.end()) {
        return;
    }
    index_.erase(it->second.cell);
    entries_.erase(it);
    order_.erase(std::lower_bound(order_.begin(), order_.end(), id));
}

template <typename Visit>
void CoveringSet::for_each_covering(const StatePoint& p, Visit&& visit) const {
    spec_.check_dims(p);
    for (std::size_t j = 0; j < p.disc.size(); ++j) {
        if (spec_.disc_dims[j].rank(p.disc[j]) < 0) {
            return;
        }
    }
    const std::size_t n = p.cont.size();
    std::vector<std::vector<std::int64_t>> candidates(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(p.cont[i])) {
            return;
        }
        const std::int64_t k0 = cell_index(spec_, i, p.cont[i]);
        const std::int64_t last = spec_.cell_count(i) - 1;
        for (std::int64_t k = std::max<std::int64_t>(0, k0 - 1); k <= std::min(last, k0 + 1); ++k) {
            if (std::abs(p.cont[i] - cell_center(spec_, i, k)) <= spec_.delta[i] * (1.0 + kLatticeTol)) {
                candidates[i].push_back(k);
            }
        }
        if (candidates[i].empty()) {
            return;
        }
    }
    CellKey key(n + p.disc.size());
    std::copy(p.disc.begin(), p.disc.end(), key.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<std::size_t> odometer(n, 0);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) {
            key[i] = candidates[i][odometer[i]];
        }
        if (const auto it = index_.find(key); it != index_.end()) {
            if (!visit(it->second)) {
                return;
            }
        }
        std::size_t i = 0;
        while (i < n && ++odometer[i] == candidates[i].size()) {
            odometer[i] = 0;
            ++i;
        }
        if (i == n) {
            return;
        }
    }
}

bool CoveringSet::contains(const StatePoint& p) const {
    bool found = false;
    for_each_covering(p, [&](CentroidId) {
        found = true;
        return false;
    });
    return found;
}

std::vector<CentroidId> CoveringSet::covering(const StatePoint& p) const {
    std::vector<CentroidId> ids;
    for_each_covering(p, [&](CentroidId id) {
        ids.push_back(id);
        return true;
    });
    std::sort(ids.begin(), ids.end());
    return ids;
}

CentroidId CoveringSet::norm_nearest(const StatePoint& p) const {
    if (empty()) {
        throw EmptySetError("norm-nearest query on an empty centroid set");
    }
    const auto q = normalize(spec_, p);
    CentroidId best = order_.front();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto id : order_) {
        const double d2 = squared_distance(q, entries_.at(id).normalized);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = id;
        }
    }
    return best;
}

std::size_t nearest_normalized(const OssSpec& spec, std::span<const StatePoint> candidates, const StatePoint& p) {
    if (candidates.empty()) {
        throw EmptySetError("norm-nearest query on an empty candidate list");
    }
    const auto q = normalize(spec, p);
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const double d2 = squared_distance(q, normalize(spec, candidates[k]));
        if (d2 < best_d2) {
            best_d2 = d2;
            best = k;
        }
    }
    return best;
}

CellSet CoveringSet::cells() const {
    CellSet out;
    for (const auto& [key, id] : index_) {
        out.insert(key);
    }
    return out;
}

CoveringSet build_initial_covering(const OssSpec& spec, std::size_t capacity) {
    spec.validate();
    const std::size_t total = spec.grid_size();
    if (total > capacity) {
        throw CapacityError("initial covering needs " + std::to_string(total) + " centroids, limit is " +
                            std::to_string(capacity));
    }
    CoveringSet cs(spec, capacity);
    const std::size_t n = spec.cont_dims.size();
    const std::size_t m = spec.disc_dims.size();
    std::vector<std::vector<std::int64_t>> axes;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::int64_t> ks(static_cast<std::size_t>(spec.cell_count(i)));
        for (std::size_t k = 0; k < ks.size(); ++k) {
            ks[k] = static_cast<std::int64_t>(k);
        }
        axes.push_back(std::move(ks));
    }
    for (std::size_t j = 0; j < m; ++j) {
        axes.push_back(sorted_values(spec.disc_dims[j]));
    }
    std::vector<std::size_t> odometer(axes.size(), 0);
    CellKey key(axes.size());
    while (true) {
        for (std::size_t a = 0; a < axes.size(); ++a) {
            key[a] = axes[a][odometer[a]];
        }
        cs.insert(centroid_of(spec, key));
        std::size_t a = axes.size();
        while (a > 0 && ++odometer[a - 1] == axes[a - 1].size()) {
            odometer[a - 1] = 0;
            --a;
        }
        if (a == 0) {
            break;
        }
    }
    return cs;
}

double iou(std::span<const CellSet> sets) {
    if (sets.size() < 2) {
        throw Error("IoU needs at least two sets");
    }
    CellSet uni;
    for (const auto& s : sets) {
        uni.insert(s.begin(), s.end());
    }
    if (uni.empty()) {
        throw EmptySetError("IoU of sets that are all empty is undefined");
    }
    std::size_t inter = 0;
    for (const auto& key : sets.front()) {
        const bool everywhere =
            std::all_of(sets.begin() + 1, sets.end(), [&](const CellSet& s) { return s.count(key) != 0; });
        inter += everywhere ? 1 : 0;
    }
    return static_cast<double>(inter) / static_cast<double>(uni.size());
}

double iou(std::span<const CoveringSet* const> sets) {
    std::vector<CellSet> cells;
    for (const auto* s : sets) {
        if (!(s->spec() == sets.front()->spec())) {
            throw GridMismatchError("IoU over sets built on different OSS grids");
        }
        cells.push_back(s->cells());
    }
    return iou(std::span<const CellSet>(cells));
}

}  // namespace safeset
