#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace genf {

struct MetricSet {
    double mse = 0.0;
    double mae = 0.0;
    double smape = 0.0; // percent, in [0, 200]
    std::size_t n = 0;
};

namespace detail {
inline void check_pair(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size())
        throw std::invalid_argument("metrics: length mismatch");
    if (y.empty())
        throw std::invalid_argument("metrics: empty input");
}
} // namespace detail

inline double mse(std::span<const double> y, std::span<const double> yhat) {
    detail::check_pair(y, yhat);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        s += d * d;
    }
    return s / static_cast<double>(y.size());
}

inline double mae(std::span<const double> y, std::span<const double> yhat) {
    detail::check_pair(y, yhat);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

/// Symmetric MAPE in percent: (100/n) * sum 2|y-yhat| / (|y|+|yhat|),
/// a term with both values zero counts as 0. Range [0, 200].
inline double smape(std::span<const double> y, std::span<const double> yhat) {
    detail::check_pair(y, yhat);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double denom = std::abs(y[i]) + std::abs(yhat[i]);
        if (denom == 0.0) continue;
        s += 2.0 * std::abs(y[i] - yhat[i]) / denom;
    }
    return 100.0 * s / static_cast<double>(y.size());
}

inline MetricSet compute_metrics(std::span<const double> y, std::span<const double> yhat) {
    MetricSet m;
    m.mse = mse(y, yhat);
    m.mae = mae(y, yhat);
    m.smape = smape(y, yhat);
    m.n = y.size();
    return m;
}

} // namespace genf
