#include "znl/empirical.hpp"

#include <algorithm>
#include <cmath>

#include "znl/rng.hpp"

namespace znl {

std::size_t GridSpec::total_bins() const {
    std::size_t n = 1;
    for (int b : bins) n *= static_cast<std::size_t>(b);
    return n;
}

void GridSpec::validate() const {
    if (lo.size() != hi.size() || static_cast<std::size_t>(lo.size()) != bins.size())
        fail(Errc::BadParams, "grid lo/hi/bins sizes disagree");
    for (std::size_t d = 0; d < bins.size(); ++d) {
        if (bins[d] < 1) fail(Errc::BadParams, "grid bins must be >= 1");
        if (!(hi[d] > lo[d])) fail(Errc::BadParams, "grid box must have positive extent");
    }
}

std::optional<std::size_t> GridSpec::index_of(const Vec& x) const {
    std::size_t flat = 0;
    for (int d = 0; d < dim(); ++d) {
        const double w = (hi[d] - lo[d]) / bins[d];
        const double pos = (x[d] - lo[d]) / w;
        if (pos < 0.0 || pos >= static_cast<double>(bins[d])) return std::nullopt;
        flat = flat * static_cast<std::size_t>(bins[d]) + static_cast<std::size_t>(pos);
    }
    return flat;
}

std::vector<int> GridSpec::coords_of(std::size_t flat) const {
    std::vector<int> coords(bins.size());
    for (int d = dim() - 1; d >= 0; --d) {
        coords[d] = static_cast<int>(flat % static_cast<std::size_t>(bins[d]));
        flat /= static_cast<std::size_t>(bins[d]);
    }
    return coords;
}

Vec GridSpec::center_of(std::size_t flat) const {
    const std::vector<int> coords = coords_of(flat);
    Vec center(dim());
    for (int d = 0; d < dim(); ++d) {
        const double w = (hi[d] - lo[d]) / bins[d];
        center[d] = lo[d] + (coords[d] + 0.5) * w;
    }
    return center;
}

GridSpec GridSpec::uniform(const Vec& lo, const Vec& hi, int bins_per_dim) {
    GridSpec grid;
    grid.lo = lo;
    grid.hi = hi;
    grid.bins.assign(lo.size(), bins_per_dim);
    grid.validate();
    return grid;
}

GridSpec GridSpec::infer(const ModelSpec& model, const Vec& x0, const SimParams& params,
                         int bins_per_dim) {
    Vec lo = x0;
    Vec hi = x0;
    SimParams pilot = params;
    pilot.epsilon = 0.0;
    flow_run(model, x0, pilot, [&](std::size_t, double, const Vec& x) {
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
    });
    Vec glo(model.dim), ghi(model.dim);
    for (int d = 0; d < model.dim; ++d) {
        const double c = 0.5 * (lo[d] + hi[d]);
        const double h = std::max(0.75 * (hi[d] - lo[d]), 0.5);
        glo[d] = c - h;
        ghi[d] = c + h;
    }
    return uniform(glo, ghi, bins_per_dim);
}

std::uint64_t sample_priority(std::uint64_t salt, std::uint64_t path_index, std::uint64_t step_index) {
    return hash_mix(salt ^ 0xA02B0F53F35C1DBDULL, path_index, step_index);
}

EmpiricalMeasure::EmpiricalMeasure(int dim, std::optional<GridSpec> grid, std::size_t reservoir_capacity)
    : dim_(dim), grid_(std::move(grid)), capacity_(reservoir_capacity) {
    if (grid_) {
        grid_->validate();
        if (grid_->dim() != dim_) fail(Errc::DimensionMismatch, "grid dimension mismatch");
        counts_.assign(grid_->total_bins(), 0);
    }
}

EmpiricalMeasure EmpiricalMeasure::from_samples(const std::vector<Vec>& samples,
                                                std::optional<GridSpec> grid,
                                                std::size_t reservoir_capacity) {
    if (samples.empty()) fail(Errc::BadParams, "from_samples needs at least one sample");
    const std::size_t cap = reservoir_capacity == 0 ? samples.size() : reservoir_capacity;
    EmpiricalMeasure m(static_cast<int>(samples.front().size()), std::move(grid), cap);
    for (std::size_t i = 0; i < samples.size(); ++i)
        m.add(samples[i], sample_priority(0, 0, i));
    return m;
}

bool EmpiricalMeasure::entry_less(const Entry& a, const Entry& b) {
    if (a.priority != b.priority) return a.priority < b.priority;
    return std::lexicographical_compare(a.state.data(), a.state.data() + a.state.size(),
                                        b.state.data(), b.state.data() + b.state.size());
}

void EmpiricalMeasure::add(const Vec& x, std::uint64_t priority) {
    require_dim(x, dim_, "sample");
    ++total_;
    if (grid_) {
        if (auto idx = grid_->index_of(x))
            ++counts_[*idx];
        else
            ++leak_;
    }
    if (capacity_ == 0) return;
    if (heap_.size() < capacity_) {
        heap_.push_back({priority, x});
        std::push_heap(heap_.begin(), heap_.end(), entry_less);
    } else if (entry_less({priority, x}, heap_.front())) {
        std::pop_heap(heap_.begin(), heap_.end(), entry_less);
        heap_.back() = {priority, x};
        std::push_heap(heap_.begin(), heap_.end(), entry_less);
    }
}

void EmpiricalMeasure::merge(const EmpiricalMeasure& other) {
    if (other.dim_ != dim_) fail(Errc::DimensionMismatch, "cannot merge measures of different dimension");
    if (grid_.has_value() != other.grid_.has_value() ||
        (grid_ && counts_.size() != other.counts_.size()))
        fail(Errc::BadParams, "cannot merge measures with different grids");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    leak_ += other.leak_;
    total_ += other.total_;
    for (const Entry& e : other.heap_) {
        if (heap_.size() < capacity_) {
            heap_.push_back(e);
            std::push_heap(heap_.begin(), heap_.end(), entry_less);
        } else if (capacity_ > 0 && entry_less(e, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), entry_less);
            heap_.back() = e;
            std::push_heap(heap_.begin(), heap_.end(), entry_less);
        }
    }
}

double EmpiricalMeasure::leak_mass() const {
    return total_ == 0 ? 0.0 : static_cast<double>(leak_) / static_cast<double>(total_);
}

double EmpiricalMeasure::mass_at(std::size_t flat) const {
    return total_ == 0 ? 0.0 : static_cast<double>(counts_[flat]) / static_cast<double>(total_);
}

std::vector<double> EmpiricalMeasure::masses() const {
    std::vector<double> m(counts_.size(), 0.0);
    if (total_ == 0) return m;
    for (std::size_t i = 0; i < counts_.size(); ++i)
        m[i] = static_cast<double>(counts_[i]) / static_cast<double>(total_);
    return m;
}

std::vector<Vec> EmpiricalMeasure::reservoir() const {
    std::vector<Entry> sorted = heap_;
    std::sort(sorted.begin(), sorted.end(), entry_less);
    std::vector<Vec> out;
    out.reserve(sorted.size());
    for (auto& e : sorted) out.push_back(e.state);
    return out;
}

double EmpiricalMeasure::outside_mass(double radius) const {
    if (heap_.empty()) return 0.0;
    std::size_t outside = 0;
    for (const Entry& e : heap_) {
        if (e.state.norm() > radius) ++outside;
    }
    return static_cast<double>(outside) / static_cast<double>(heap_.size());
}

}  // namespace znl
