#include "znl/wasserstein.hpp"

#include <algorithm>
#include <cmath>

#include "znl/rng.hpp"

namespace znl {

namespace {

// (value, weight) atoms of a measure projected onto `direction` (or raw 1-d).
std::vector<std::pair<double, double>> atoms_of(const EmpiricalMeasure& m, const Vec* direction) {
    std::vector<std::pair<double, double>> atoms;
    const std::vector<Vec> res = m.reservoir();
    if (!res.empty()) {
        const double w = 1.0 / static_cast<double>(res.size());
        atoms.reserve(res.size());
        for (const Vec& x : res)
            atoms.emplace_back(direction ? direction->dot(x) : x[0], w);
        return atoms;
    }
    if (!m.grid()) fail(Errc::BadParams, "measure has neither reservoir nor histogram");
    const auto& grid = *m.grid();
    double in_grid = 0.0;
    for (std::size_t i = 0; i < grid.total_bins(); ++i) in_grid += m.mass_at(i);
    if (!(in_grid > 0.0)) fail(Errc::BadParams, "measure has no in-grid mass");
    for (std::size_t i = 0; i < grid.total_bins(); ++i) {
        const double mass = m.mass_at(i);
        if (mass == 0.0) continue;
        const Vec c = grid.center_of(i);
        atoms.emplace_back(direction ? direction->dot(c) : c[0], mass / in_grid);
    }
    return atoms;
}

}  // namespace

double w1_atoms(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // Integrate |F_a - F_b| over the merged support.
    double dist = 0.0;
    double fa = 0.0, fb = 0.0;
    std::size_t ia = 0, ib = 0;
    double prev = std::min(a.front().first, b.front().first);
    while (ia < a.size() || ib < b.size()) {
        double x;
        if (ib >= b.size() || (ia < a.size() && a[ia].first <= b[ib].first))
            x = a[ia].first;
        else
            x = b[ib].first;
        dist += std::abs(fa - fb) * (x - prev);
        while (ia < a.size() && a[ia].first == x) fa += a[ia++].second;
        while (ib < b.size() && b[ib].first == x) fb += b[ib++].second;
        prev = x;
    }
    return dist;
}

double w1_distance_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.dim() != 1 || b.dim() != 1)
        fail(Errc::DimensionMismatch, "w1_distance_1d needs one-dimensional measures");
    return w1_atoms(atoms_of(a, nullptr), atoms_of(b, nullptr));
}

std::vector<Vec> slicing_directions(int dim, int n_directions, std::uint64_t seed) {
    if (dim < 2) fail(Errc::DimensionMismatch, "slicing needs dimension >= 2");
    if (n_directions < 1) fail(Errc::BadParams, "need at least one direction");
    std::vector<Vec> dirs;
    dirs.reserve(n_directions);
    if (dim == 2) {
        for (int i = 0; i < n_directions; ++i) {
            const double theta = M_PI * (i + 0.5) / n_directions;
            Vec u(2);
            u << std::cos(theta), std::sin(theta);
            dirs.push_back(u);
        }
        return dirs;
    }
    RngStream stream(seed, 0x51CEDULL);
    for (int i = 0; i < n_directions; ++i) {
        Vec u(dim);
        double norm = 0.0;
        do {
            for (int d = 0; d < dim; ++d) u[d] = stream.normal();
            norm = u.norm();
        } while (norm == 0.0);
        dirs.push_back(u / norm);
    }
    return dirs;
}

double sliced_w1_directions(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                            const std::vector<Vec>& directions) {
    if (a.dim() != b.dim()) fail(Errc::DimensionMismatch, "measure dimensions disagree");
    if (directions.empty()) fail(Errc::BadParams, "need at least one direction");
    double sum = 0.0;
    for (const Vec& u : directions) {
        if (u.size() != a.dim()) fail(Errc::DimensionMismatch, "direction dimension mismatch");
        sum += w1_atoms(atoms_of(a, &u), atoms_of(b, &u));
    }
    return sum / static_cast<double>(directions.size());
}

double sliced_w1(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int n_directions,
                 std::uint64_t seed) {
    if (a.dim() < 2) fail(Errc::DimensionMismatch, "sliced_w1 needs dimension >= 2");
    return sliced_w1_directions(a, b, slicing_directions(a.dim(), n_directions, seed));
}

}  // namespace znl
