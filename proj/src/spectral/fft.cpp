#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace roughwave::detail {

namespace {

class PlanRegistry {
public:
    ~PlanRegistry() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int dim, int n_axis, int sign) {
        const auto key = std::make_tuple(dim, n_axis, sign);
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::size_t total = 1;
        int dims[3];
        for (int d = 0; d < dim; ++d) {
            dims[d] = n_axis;
            total *= static_cast<std::size_t>(n_axis);
        }
        // FFTW_ESTIMATE never touches the buffer, so a scratch array suffices for planning.
        std::vector<std::complex<double>> scratch(total);
        auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft(dim, dims, ptr, ptr, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanRegistry& registry() {
    static PlanRegistry instance;
    return instance;
}

}  // namespace

void fft_inplace(std::span<std::complex<double>> data, int dim, int points_per_axis, int sign) {
    fftw_plan plan = registry().get(dim, points_per_axis, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace roughwave::detail
