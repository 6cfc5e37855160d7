#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace pdpmc {

inline constexpr std::size_t kDefaultChunk = 4096;

/// Runs trajectories 0..n_traj-1 on `workers` threads.
///
/// Trajectories are grouped in fixed chunks of `chunk` indices; every chunk fills
/// a fresh accumulator from `make_acc()` and chunk results are merged in chunk
/// order. The result therefore depends only on n_traj and chunk, never on the
/// worker count or the scheduling. `make_worker()` is called once per thread and
/// returns a callable `(Acc&, std::size_t traj)` that may keep scratch space.
/// The first exception thrown by any worker is rethrown after all threads join.
template <class MakeAcc, class MakeWorker>
auto run_ensemble(std::size_t n_traj, unsigned workers, MakeAcc&& make_acc, MakeWorker&& make_worker,
                  std::size_t chunk = kDefaultChunk) {
    using Acc = decltype(make_acc());
    if (chunk == 0) chunk = kDefaultChunk;
    const std::size_t n_chunks = (n_traj + chunk - 1) / chunk;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n_chunks, 1))));

    Acc total = make_acc();
    std::atomic<std::size_t> next_chunk{0};
    std::mutex merge_mutex;
    std::map<std::size_t, Acc> pending;
    std::size_t next_merge = 0;
    std::exception_ptr failure;
    std::atomic<bool> abort{false};

    auto work = [&] {
        try {
            auto worker = make_worker();
            while (!abort.load(std::memory_order_relaxed)) {
                const std::size_t c = next_chunk.fetch_add(1);
                if (c >= n_chunks) break;
                Acc acc = make_acc();
                const std::size_t end = std::min(n_traj, (c + 1) * chunk);
                for (std::size_t r = c * chunk; r < end; ++r) worker(acc, r);
                std::lock_guard lock(merge_mutex);
                pending.emplace(c, std::move(acc));
                for (auto it = pending.find(next_merge); it != pending.end(); it = pending.find(next_merge)) {
                    total.merge(it->second);
                    pending.erase(it);
                    ++next_merge;
                }
            }
        } catch (...) {
            std::lock_guard lock(merge_mutex);
            if (!failure) failure = std::current_exception();
            abort = true;
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return total;
}

} // namespace pdpmc
