#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdelab {

// Time-stamped record of one tracked quantity (a norm, a running supremum,
// a weighted decay monitor).  Timestamps are strictly increasing and values
// finite and nonnegative; append() enforces both.
class NormSeries {
  public:
    NormSeries() = default;
    explicit NormSeries(std::string tag) : tag_(std::move(tag)) {}

    void append(double t, double value) {
        if (!std::isfinite(t) || !std::isfinite(value))
            throw std::invalid_argument("NormSeries: non-finite sample");
        if (value < 0.0)
            throw std::invalid_argument("NormSeries: negative value");
        if (!samples_.empty() && t <= samples_.back().first)
            throw std::invalid_argument("NormSeries: timestamps must increase");
        samples_.emplace_back(t, value);
    }

    const std::string& tag() const { return tag_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    double t(std::size_t i) const { return samples_[i].first; }
    double value(std::size_t i) const { return samples_[i].second; }
    const std::vector<std::pair<double, double>>& samples() const { return samples_; }
    double back_value() const { return samples_.back().second; }
    double back_t() const { return samples_.back().first; }

    // Least-squares slope of log(value) against log(t) over [i0, i1].
    // Zero values are skipped; throws if fewer than two usable samples.
    double loglog_slope(std::size_t i0, std::size_t i1) const {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t m = 0;
        for (std::size_t i = i0; i <= i1 && i < samples_.size(); ++i) {
            if (samples_[i].first <= 0.0 || samples_[i].second <= 0.0) continue;
            const double x = std::log(samples_[i].first);
            const double y = std::log(samples_[i].second);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++m;
        }
        if (m < 2) throw std::runtime_error("loglog_slope: not enough samples");
        const double denom = m * sxx - sx * sx;
        return (m * sxy - sx * sy) / denom;
    }

  private:
    std::string tag_;
    std::vector<std::pair<double, double>> samples_;
};

// CSV emission, one row per sample: t, quantity, value.  Floats carry 17
// significant digits so re-runs are byte-comparable.
void write_series_csv(const std::string& path, const std::vector<const NormSeries*>& series);

} // namespace pdelab
