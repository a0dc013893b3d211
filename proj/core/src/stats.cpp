#include "hml/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hml {

Interval wilson_interval(std::uint64_t hits, std::uint64_t total, double z) {
    if (total == 0) return {0.0, 1.0};
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    double lo = (center - half) / denom;
    double hi = (center + half) / denom;
    lo = std::max(0.0, lo);
    hi = std::min(1.0, hi);
    // At the extremes the score bound is exact; cancellation must not leak
    // a stray ulp into the closed endpoint.
    if (hits == 0) lo = 0.0;
    if (hits == total) hi = 1.0;
    return {lo, hi};
}

double chi_square_uniform(const std::vector<std::uint64_t>& counts) {
    if (counts.empty()) return 0.0;
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) return 0.0;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

double chi_square_quantile_999(int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square_quantile_999: dof must be positive");
    if (dof == 15) return 37.697;
    // Wilson-Hilferty: chi2_q(k) ~ k (1 - 2/(9k) + z_q sqrt(2/(9k)))^3,
    // within ~0.5% at this tail for k >= 3.
    const double z999 = 3.090232306167814;
    const double k = static_cast<double>(dof);
    const double a = 1.0 - 2.0 / (9.0 * k) + z999 * std::sqrt(2.0 / (9.0 * k));
    return k * a * a * a;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& sigma_y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need at least two points");
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (!sigma_y.empty()) {
        if (sigma_y.size() != n)
            throw std::invalid_argument("fit_line: sigma size mismatch");
        // slope = sum_i c_i y_i with c_i = (x_i - mx) / sxx, so
        // Var(slope) = sum_i c_i^2 sigma_i^2 for independent y_i.
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = (x[i] - mx) / sxx;
            var += c * c * sigma_y[i] * sigma_y[i];
        }
        fit.slope_se = std::sqrt(var);
    }
    return fit;
}

double weighted_median(std::vector<std::pair<double, double>> samples) {
    return weighted_quantile(std::move(samples), 0.5);
}

double weighted_quantile(std::vector<std::pair<double, double>> samples, double q) {
    if (samples.empty()) throw std::invalid_argument("weighted_quantile: empty");
    std::sort(samples.begin(), samples.end());
    double total = 0.0;
    for (const auto& [v, w] : samples) total += w;
    if (total <= 0.0) throw std::invalid_argument("weighted_quantile: zero weight");
    const double target = q * total;
    double acc = 0.0;
    for (const auto& [v, w] : samples) {
        acc += w;
        if (acc >= target) return v;
    }
    return samples.back().first;
}

} // namespace hml
