#pragma once

#include <algorithm>
#include <cmath>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace srgg {

namespace detail {
inline std::atomic<unsigned>& worker_count_slot() {
    static std::atomic<unsigned> slot{0};
    return slot;
}
} // namespace detail

/// Threads used by chunked Monte-Carlo loops. 0 means "pick automatically"
/// (SRGG_THREADS, else hardware concurrency).
inline void set_worker_count(unsigned n) { detail::worker_count_slot().store(n); }

inline unsigned worker_count() {
    unsigned n = detail::worker_count_slot().load();
    if (n != 0) return n;
    if (const char* env = std::getenv("SRGG_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct ChunkPlan {
    std::size_t total = 0;
    std::size_t chunk_size = 1 << 16;

    std::size_t chunks() const { return chunk_size == 0 ? 0 : (total + chunk_size - 1) / chunk_size; }
    std::size_t begin(std::size_t c) const { return c * chunk_size; }
    std::size_t end(std::size_t c) const { return std::min(total, (c + 1) * chunk_size); }
};

/// Runs fn(chunk_index, begin, end) for every chunk of `plan` and returns the
/// per-chunk results in chunk order.
///
/// Chunks are claimed dynamically by up to `threads` workers, but each result
/// lands in its own slot, so any in-order reduction of the returned vector is
/// bit-identical for every thread count.
template <class Partial, class Fn>
std::vector<Partial> run_chunks(const ChunkPlan& plan, Fn&& fn, unsigned threads = 0) {
    const std::size_t n = plan.chunks();
    std::vector<Partial> out(n);
    if (n == 0) return out;
    if (threads == 0) threads = worker_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));

    if (threads <= 1) {
        for (std::size_t c = 0; c < n; ++c) out[c] = fn(c, plan.begin(c), plan.end(c));
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n) return;
            try {
                out[c] = fn(c, plan.begin(c), plan.end(c));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

/// Running mean / variance accumulator that merges in a fixed order.
struct MomentSum {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++count;
    }
    void merge(const MomentSum& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        count += o.count;
    }
    double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
    double variance() const {
        if (count < 2) return 0.0;
        const double m = mean();
        const double v = (sum_sq - static_cast<double>(count) * m * m) / static_cast<double>(count - 1);
        return v > 0.0 ? v : 0.0;
    }
    double std_error() const {
        return count ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
    }
};

} // namespace srgg
