#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "znl/model.hpp"
#include "znl/types.hpp"

namespace znl {

// One reproducible random stream per Monte-Carlo path. Streams are derived
// from (master_seed, stream_index) by hash mixing, so ensemble results do not
// depend on worker scheduling.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

    double normal();               // N(0, 1)
    double uniform();              // [0, 1)
    double exponential(double rate);

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_index() const { return index_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
    std::uint64_t master_ = 0;
    std::uint64_t index_ = 0;
};

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t path_index);

// splitmix64 output for (salt, a, b); used for stream seeding and for the
// reservoir priorities in the measures module.
std::uint64_t hash_mix(std::uint64_t salt, std::uint64_t a, std::uint64_t b);

// n_steps i.i.d. N(0, dt I_k) increments.
std::vector<Vec> brownian_increments(RngStream& stream, int k, std::size_t n_steps, double dt);

// Poisson events on [0, horizon] with total rate Sum_j w_j, marks chosen with
// probability w_j / Lambda, times sorted (generated by exponential spacings).
std::vector<JumpEvent> jump_events(RngStream& stream, const JumpCatalogue& catalogue, double horizon);

}  // namespace znl
