#include "roughwave/time_series.hpp"

#include <stdexcept>

namespace roughwave {

void TimeSeries::validate() const {
    if (times.empty()) throw std::invalid_argument("time series is empty");
    if (times.size() != fields.size()) throw std::invalid_argument("time series has mismatched lengths");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("times must increase strictly");
        if (!(fields[i].grid() == fields[0].grid())) throw std::invalid_argument("time series mixes grids");
    }
    if (times.front() < 0.0) throw std::invalid_argument("times must be nonnegative");
}

std::vector<double> uniform_times(double t_final, int steps) {
    if (!(t_final > 0.0) || steps < 1) throw std::invalid_argument("uniform grid needs T > 0 and steps >= 1");
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) t[i] = t_final * static_cast<double>(i) / steps;
    return t;
}

TimeSeries zero_series(const GridSpec& grid, const std::vector<double>& times) {
    TimeSeries s;
    s.times = times;
    s.fields.assign(times.size(), SpectralField(grid));
    return s;
}

TimeSeries series_difference(const TimeSeries& a, const TimeSeries& b) {
    if (a.times != b.times) throw std::invalid_argument("series sampled on different times");
    TimeSeries s;
    s.times = a.times;
    s.fields.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) s.fields.push_back(a.fields[i] - b.fields[i]);
    return s;
}

TimeSeries series_window(const TimeSeries& s, std::size_t first, std::size_t last) {
    if (first > last || last >= s.size()) throw std::out_of_range("window outside time series");
    TimeSeries w;
    w.times.assign(s.times.begin() + static_cast<long>(first), s.times.begin() + static_cast<long>(last) + 1);
    w.fields.assign(s.fields.begin() + static_cast<long>(first), s.fields.begin() + static_cast<long>(last) + 1);
    return w;
}

}  // namespace roughwave
