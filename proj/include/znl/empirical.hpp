#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "znl/integrate.hpp"
#include "znl/model.hpp"
#include "znl/types.hpp"

namespace znl {

// Rectangular binning: per-dimension [lo, hi) split into bins cells.
struct GridSpec {
    Vec lo;
    Vec hi;
    std::vector<int> bins;

    int dim() const { return static_cast<int>(bins.size()); }
    std::size_t total_bins() const;
    // Flat row-major bin index, or nullopt when x falls outside the box.
    std::optional<std::size_t> index_of(const Vec& x) const;
    Vec center_of(std::size_t flat) const;
    std::vector<int> coords_of(std::size_t flat) const;
    void validate() const;

    static GridSpec uniform(const Vec& lo, const Vec& hi, int bins_per_dim);
    // Box of a pilot deterministic run, inflated by 50% (degenerate dimensions
    // get a 0.5 half-width floor), 128 bins per dimension by default.
    static GridSpec infer(const ModelSpec& model, const Vec& x0, const SimParams& params,
                          int bins_per_dim = 128);
};

// Normalized histogram plus a deterministic uniform subsample of raw states.
// The reservoir keeps the `capacity` entries with the smallest hash
// priorities, which makes merging associative: pooling two runs over disjoint
// path ranges is bit-identical to one run over their union.
class EmpiricalMeasure {
public:
    explicit EmpiricalMeasure(int dim, std::optional<GridSpec> grid = {},
                              std::size_t reservoir_capacity = 4096);
    static EmpiricalMeasure from_samples(const std::vector<Vec>& samples,
                                         std::optional<GridSpec> grid = {},
                                         std::size_t reservoir_capacity = 0);  // 0: keep all

    void add(const Vec& x, std::uint64_t priority);
    void merge(const EmpiricalMeasure& other);

    int dim() const { return dim_; }
    const std::optional<GridSpec>& grid() const { return grid_; }
    std::uint64_t total_samples() const { return total_; }
    double leak_mass() const;
    double mass_at(std::size_t flat) const;
    std::vector<double> masses() const;
    // Reservoir states sorted by priority (deterministic order).
    std::vector<Vec> reservoir() const;
    std::size_t reservoir_capacity() const { return capacity_; }
    // Fraction of reservoir samples with |x| > radius.
    double outside_mass(double radius) const;

private:
    struct Entry {
        std::uint64_t priority;
        Vec state;
    };
    static bool entry_less(const Entry& a, const Entry& b);

    int dim_;
    std::optional<GridSpec> grid_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t leak_ = 0;
    std::uint64_t total_ = 0;
    std::size_t capacity_;
    std::vector<Entry> heap_;  // max-heap on (priority, state): bottom-k survivors
};

// Priority for the sample recorded at (path_index, step_index) under the given
// salt (the experiment master seed).
std::uint64_t sample_priority(std::uint64_t salt, std::uint64_t path_index, std::uint64_t step_index);

}  // namespace znl
