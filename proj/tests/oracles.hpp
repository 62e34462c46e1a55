#pragma once
// Independent reference computations used by the tests. Deliberately naive.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "itemaudit/common.hpp"

namespace oracle {

inline double euclid(const itemaudit::Matrix& x, std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const double d = x(a, j) - x(b, j);
        s += d * d;
    }
    return std::sqrt(s);
}

// O(n^2) silhouette straight from the definition.
inline double silhouette(const itemaudit::Matrix& x, const std::vector<std::size_t>& labels) {
    const std::size_t n = x.rows();
    std::size_t k = 0;
    for (auto l : labels) k = std::max(k, l + 1);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> sum(k, 0.0);
        std::vector<std::size_t> cnt(k, 0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum[labels[j]] += euclid(x, i, j);
            ++cnt[labels[j]];
        }
        if (cnt[labels[i]] == 0) continue; // singleton
        const double a = sum[labels[i]] / static_cast<double>(cnt[labels[i]]);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c)
            if (c != labels[i] && cnt[c] > 0) b = std::min(b, sum[c] / static_cast<double>(cnt[c]));
        const double m = std::max(a, b);
        total += m > 0.0 ? (b - a) / m : 0.0;
    }
    return total / static_cast<double>(n);
}

// Chi-square upper tail by composite Simpson integration of the density.
// The integrand is singular at 0 for df = 1, so that case substitutes x = u^2.
inline double chi_square_sf(double stat, int df) {
    const double k = df / 2.0;
    const double log_norm = -k * std::log(2.0) - std::lgamma(k);
    auto pdf = [&](double x) { return x <= 0.0 ? (df == 2 ? 0.5 : 0.0) : std::exp(log_norm + (k - 1.0) * std::log(x) - x / 2.0); };
    auto simpson = [](const std::function<double(double)>& f, double a, double b, int n) {
        const double h = (b - a) / n;
        double s = f(a) + f(b);
        for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return s * h / 3.0;
    };
    const int n = 200000;
    if (df == 1) {
        // P(X > s) = 1 - P(X <= s); substitute x = u^2, dx = 2u du
        auto g = [&](double u) { return u == 0.0 ? 2.0 * std::exp(log_norm) : pdf(u * u) * 2.0 * u; };
        return 1.0 - simpson(g, 0.0, std::sqrt(stat), n);
    }
    const double upper = stat + 400.0;
    return simpson(pdf, stat, upper, n);
}

// Central finite difference of a scalar function of one parameter.
inline double central_diff(const std::function<double(double)>& f, double x, double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

} // namespace oracle
