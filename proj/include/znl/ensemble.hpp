#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "znl/rng.hpp"
#include "znl/types.hpp"

namespace znl {

// Resolves a thread-count request: 0 consults ZNL_THREADS, then hardware
// concurrency. Thread count affects speed only, never results.
int resolve_threads(int requested);

struct EnsembleOptions {
    std::uint64_t master_seed = 0;
    std::size_t n_paths = 1;
    int threads = 0;
    std::size_t path_offset = 0;   // global index of the first path
    std::size_t chunk_size = 64;   // fixed; reduction granularity, not a tuning knob
};

// Runs per_path(i, stream_i) for i in [offset, offset + n), reducing results
// deterministically: paths fold in ascending order within fixed chunks, chunk
// accumulators merge in ascending chunk order. Output is bit-identical for
// any thread count. Path errors propagate with the smallest failing index.
//
//   per_path : (std::size_t path_index, RngStream&) -> T
//   fold     : (Acc&, std::size_t path_index, T&&)
//   merge    : (Acc&, Acc&&)
template <class Acc, class PathFn, class FoldFn, class MergeFn>
Acc run_ensemble(const EnsembleOptions& opt, PathFn&& per_path, Acc init, FoldFn&& fold, MergeFn&& merge) {
    const std::size_t n = opt.n_paths;
    if (n == 0) return init;
    const std::size_t chunk = opt.chunk_size > 0 ? opt.chunk_size : 64;
    const std::size_t n_chunks = (n + chunk - 1) / chunk;

    std::vector<std::optional<Acc>> parts(n_chunks);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t first_error_path = static_cast<std::size_t>(-1);
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            Acc acc = init;
            const std::size_t lo = c * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            for (std::size_t i = lo; i < hi; ++i) {
                const std::size_t global = opt.path_offset + i;
                try {
                    RngStream stream = derive_stream(opt.master_seed, global);
                    fold(acc, global, per_path(global, stream));
                } catch (...) {
                    std::lock_guard<std::mutex> guard(error_mutex);
                    if (global < first_error_path) {
                        first_error_path = global;
                        first_error = std::current_exception();
                    }
                    return;
                }
            }
            parts[c] = std::move(acc);
        }
    };

    const int n_threads = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(opt.threads)), n_chunks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (first_error) {
        try {
            std::rethrow_exception(first_error);
        } catch (const Error& e) {
            fail(e.code(), "path " + std::to_string(first_error_path) + ": " + e.what());
        } catch (const std::exception& e) {
            fail(Errc::NonFiniteOutput, "path " + std::to_string(first_error_path) + ": " + e.what());
        }
    }

    Acc out = init;
    for (auto& part : parts) {
        if (part) merge(out, std::move(*part));
    }
    return out;
}

}  // namespace znl
