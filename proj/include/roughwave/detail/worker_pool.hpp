#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

namespace roughwave {

template <typename Result>
std::vector<Result> run_bounded(const std::vector<std::function<Result()>>& jobs, int workers) {
    std::vector<std::optional<Result>> slots(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                slots[i].emplace(jobs[i]());
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n = std::clamp<std::size_t>(workers < 1 ? 1 : workers, 1, std::max<std::size_t>(jobs.size(), 1));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<Result> out;
    out.reserve(jobs.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace roughwave
