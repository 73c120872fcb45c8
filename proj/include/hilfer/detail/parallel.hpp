#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace hilfer {

/// Worker-thread count for the solver sweeps (1 = serial). Results are
/// independent of the setting: iterations write disjoint outputs and no
/// cross-thread reductions exist.
inline int& global_thread_count() {
    static int n = 1;
    return n;
}

namespace detail {

template <class F>
void parallel_for(std::size_t begin, std::size_t end, F&& body) {
    int nt = global_thread_count();
    if (nt <= 1 || end - begin < 16) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }
    // strided assignment balances the triangular sweep costs
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(nt));
    for (int k = 0; k < nt; ++k) {
        workers.emplace_back([&, k]() {
            for (std::size_t i = begin + static_cast<std::size_t>(k); i < end;
                 i += static_cast<std::size_t>(nt))
                body(i);
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace detail
}  // namespace hilfer
