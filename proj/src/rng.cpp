#include "znl/rng.hpp"

#include <cmath>

namespace znl {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t hash_mix(std::uint64_t salt, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = salt;
    std::uint64_t h = splitmix64(s);
    s = h ^ (a + 0x632BE59BD9B4E019ULL);
    h = splitmix64(s);
    s = h ^ (b + 0xD1B54A32D192ED03ULL);
    return splitmix64(s);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_(master_seed), index_(stream_index) {
    engine_.seed(hash_mix(0x5A17F00DCAFEF00DULL, master_seed, stream_index));
}

double RngStream::normal() { return gauss_(engine_); }

double RngStream::uniform() {
    return std::generate_canonical<double, 53>(engine_);
}

double RngStream::exponential(double rate) {
    double u;
    do {
        u = uniform();
    } while (u <= 0.0);
    return -std::log(u) / rate;
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t path_index) {
    return RngStream(master_seed, path_index);
}

std::vector<Vec> brownian_increments(RngStream& stream, int k, std::size_t n_steps, double dt) {
    if (!(dt > 0.0)) fail(Errc::BadParams, "dt must be positive");
    const double scale = std::sqrt(dt);
    std::vector<Vec> out;
    out.reserve(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i) {
        Vec dw(k);
        for (int j = 0; j < k; ++j) dw[j] = scale * stream.normal();
        out.push_back(std::move(dw));
    }
    return out;
}

std::vector<JumpEvent> jump_events(RngStream& stream, const JumpCatalogue& catalogue, double horizon) {
    if (horizon < 0.0) fail(Errc::BadParams, "horizon must be nonnegative");
    std::vector<JumpEvent> events;
    if (catalogue.atoms.empty()) return events;
    const double total = catalogue.total_rate();
    if (!(total > 0.0)) return events;

    double t = stream.exponential(total);
    while (t <= horizon) {
        // Pick the atom by its share of the total rate.
        double u = stream.uniform() * total;
        int idx = 0;
        double acc = catalogue.atoms[0].rate;
        while (u > acc && idx + 1 < static_cast<int>(catalogue.atoms.size())) {
            ++idx;
            acc += catalogue.atoms[idx].rate;
        }
        events.push_back({t, idx, catalogue.atoms[idx].mark});
        t += stream.exponential(total);
    }
    return events;
}

}  // namespace znl
