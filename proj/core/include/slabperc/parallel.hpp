#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace slabperc {

/// 0 means "one job per hardware thread".
inline unsigned resolve_jobs(unsigned jobs) {
    if (jobs != 0) return jobs;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, count) into contiguous chunks, one per job, and calls
/// body(state, index) with a job-local state made by make(). Returns the
/// states in job order. Callers reduce with integer sums so the result does
/// not depend on the number of jobs.
template <class MakeState, class Body>
auto parallel_chunks(std::uint64_t count, unsigned jobs, MakeState make, Body body) {
    using State = decltype(make());
    const unsigned workers = static_cast<unsigned>(
        std::max<std::uint64_t>(1, std::min<std::uint64_t>(resolve_jobs(jobs), count)));
    std::vector<State> states;
    states.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) states.push_back(make());

    auto run = [&](unsigned w) {
        const std::uint64_t begin = count * w / workers;
        const std::uint64_t end = count * (w + 1) / workers;
        for (std::uint64_t i = begin; i < end; ++i) body(states[w], i);
    };
    if (workers == 1) {
        run(0);
        return states;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            threads.emplace_back([&, w] {
                try {
                    run(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return states;
}

}  // namespace slabperc
