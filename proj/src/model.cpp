#include "znl/model.hpp"

#include <cmath>
#include <sstream>

namespace znl {

double JumpCatalogue::total_rate() const {
    double sum = 0.0;
    for (const auto& atom : atoms) sum += atom.rate;
    return sum;
}

Vec JumpCatalogue::compensator(const Vec& x, int dim) const {
    Vec acc = Vec::Zero(dim);
    for (const auto& atom : atoms) acc += atom.rate * jump_map(x, atom.mark);
    return acc;
}

void JumpCatalogue::validate(int dim) const {
    if (!jump_map && !atoms.empty()) fail(Errc::BadParams, "jump catalogue has atoms but no jump map");
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        const auto& atom = atoms[j];
        std::ostringstream where;
        where << "jump atom " << j;
        if (!(atom.rate > 0.0)) fail(Errc::BadParams, where.str() + ": rate must be positive");
        if (atom.mark.size() != mark_dim) fail(Errc::BadParams, where.str() + ": mark dimension mismatch");
        if (!(atom.mark.norm() < truncation_radius))
            fail(Errc::BadParams, where.str() + ": mark outside truncation radius");
        if (dim > 0) {
            Vec probe = jump_map(Vec::Zero(dim), atom.mark);
            if (probe.size() != dim || !all_finite(probe))
                fail(Errc::BadParams, where.str() + ": jump map output invalid at origin");
        }
    }
}

Vec ModelSpec::effective_drift(const Vec& x, double epsilon) const {
    Vec b = drift(x);
    if (ito_correction && epsilon != 0.0) b += (epsilon * epsilon) * ito_correction(x);
    return b;
}

Vec eval_drift(const ModelSpec& model, const Vec& x) {
    require_dim(x, model.dim, "state");
    Vec b = model.drift(x);
    if (b.size() != model.dim) fail(Errc::DimensionMismatch, "drift output has wrong length");
    if (!all_finite(b)) fail(Errc::NonFiniteOutput, "drift not finite at |x|=" + std::to_string(x.norm()));
    return b;
}

Mat eval_diffusion(const ModelSpec& model, const Vec& x) {
    require_dim(x, model.dim, "state");
    Mat s = model.diffusion(x);
    if (s.rows() != model.dim || s.cols() != model.brownian_dim)
        fail(Errc::DimensionMismatch, "diffusion output has wrong shape");
    if (!all_finite(s)) fail(Errc::NonFiniteOutput, "diffusion not finite at |x|=" + std::to_string(x.norm()));
    return s;
}

}  // namespace znl
