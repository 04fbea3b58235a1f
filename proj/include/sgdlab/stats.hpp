#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace sgdlab {

struct MeanVar {
    std::size_t n = 0;
    double mean = 0.0;
    double var = 0.0;  // unbiased sample variance (0 when n < 2)

    double stddev() const { return std::sqrt(var); }
    double stderr_mean() const { return n > 0 ? std::sqrt(var / static_cast<double>(n)) : 0.0; }
};

inline MeanVar mean_var(std::span<const double> xs) {
    MeanVar mv;
    mv.n = xs.size();
    if (mv.n == 0) return mv;
    double s = 0.0;
    for (double x : xs) s += x;
    mv.mean = s / static_cast<double>(mv.n);
    if (mv.n < 2) return mv;
    double q = 0.0;
    for (double x : xs) {
        const double d = x - mv.mean;
        q += d * d;
    }
    mv.var = q / static_cast<double>(mv.n - 1);
    return mv;
}

// Quantile of a copy of the data (linear interpolation between order stats).
inline double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const double idx = p * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
    const double w = idx - static_cast<double>(lo);
    return (1.0 - w) * xs[lo] + w * xs[hi];
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double dn = static_cast<double>(n);
    const double det = dn * sxx - sx * sx;
    LineFit f;
    if (det == 0.0 || n < 2) return f;
    f.slope = (dn * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / dn;
    return f;
}

// Normal-approximation half width for a binomial proportion at confidence z.
inline double binomial_halfwidth(double phat, std::size_t n, double z) {
    if (n == 0) return 1.0;
    return z * std::sqrt(std::max(phat * (1.0 - phat), 1.0 / static_cast<double>(n)) /
                         static_cast<double>(n));
}

// Runs fn(i) for i in [0, n) on a few threads with a static partition.
// Each index writes only its own slot, so results are order-independent;
// callers reduce afterwards in index order to stay deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(hw, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace sgdlab
