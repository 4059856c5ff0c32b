#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sparselab {

// Pairwise (tree) summation with a fixed recursion shape: the tree depends
// only on the element count, never on threading or chunk scheduling, so
// accumulated values are bit-reproducible for a given binary.
template <class F>
double pairwise_sum_f(std::size_t lo, std::size_t hi, F&& f) {
    const std::size_t n = hi - lo;
    if (n <= 64) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum_f(lo, mid, f) + pairwise_sum_f(mid, hi, f);
}

inline double pairwise_sum(const double* x, std::size_t n) {
    return pairwise_sum_f(std::size_t(0), n, [x](std::size_t i) { return x[i]; });
}

// Resolves a worker count: explicit request wins, then SPARSELAB_THREADS,
// then hardware concurrency.
int resolve_threads(int requested);

// Runs chunk_fn(chunk_index, lo, hi) over [0, n) split into fixed-size chunks.
// Chunks are disjoint and their boundaries depend only on n, so any writes
// keyed by index (or per-chunk slots combined in chunk order afterwards) are
// deterministic regardless of the worker count.
void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& chunk_fn);

constexpr std::size_t kChunk = 4096;

} // namespace sparselab
