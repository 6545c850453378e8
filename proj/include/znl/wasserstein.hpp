#pragma once

#include <cstdint>
#include <vector>

#include "znl/empirical.hpp"
#include "znl/types.hpp"

namespace znl {

// Exact Wasserstein-1 between two one-dimensional measures via the CDF
// difference integral. Atoms come from the reservoir when present, otherwise
// from histogram bin centers (leak mass excluded, in-grid mass renormalized).
double w1_distance_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

// Average 1-d W1 of projections onto fixed unit directions; a pseudo-metric
// used as the weak-distance surrogate in dimension >= 2.
double sliced_w1(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int n_directions,
                 std::uint64_t seed);
double sliced_w1_directions(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                            const std::vector<Vec>& directions);

// Deterministic direction set: equispaced half-circle angles in 2-d,
// seeded normalized Gaussians in higher dimension.
std::vector<Vec> slicing_directions(int dim, int n_directions, std::uint64_t seed);

// W1 between weighted atom lists (values need not be sorted).
double w1_atoms(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b);

}  // namespace znl
