#pragma once

#include <vector>

#include "roughwave/spectral_field.hpp"

namespace roughwave {

struct TimeSeries {
    std::vector<double> times;
    std::vector<SpectralField> fields;

    // Throws std::invalid_argument unless times are nonnegative, increase strictly and
    // all fields share one grid.
    void validate() const;
    [[nodiscard]] const GridSpec& grid() const { return fields.front().grid(); }
    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] bool empty() const { return times.empty(); }
};

[[nodiscard]] std::vector<double> uniform_times(double t_final, int steps);
[[nodiscard]] TimeSeries zero_series(const GridSpec& grid, const std::vector<double>& times);
// Every field multiplied by profile(t).
template <typename Profile>
[[nodiscard]] TimeSeries profiled_series(const SpectralField& f, const std::vector<double>& times, Profile profile) {
    TimeSeries s;
    s.times = times;
    s.fields.reserve(times.size());
    for (double t : times) s.fields.push_back(cplx(profile(t)) * f);
    return s;
}

[[nodiscard]] TimeSeries series_difference(const TimeSeries& a, const TimeSeries& b);
// Samples [first, last] inclusive; times are kept as they are.
[[nodiscard]] TimeSeries series_window(const TimeSeries& s, std::size_t first, std::size_t last);

}  // namespace roughwave
