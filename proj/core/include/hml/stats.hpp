#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace hml {

// Central 95% z-score, pinned so results never depend on platform erf.
inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t hits, std::uint64_t total, double z = kZ95);

// Pearson chi-square statistic against equal expected counts.
double chi_square_uniform(const std::vector<std::uint64_t>& counts);

// 99.9% chi-square quantile. Pinned to the tabulated value at 15 degrees of
// freedom (the 16-bin uniformity check); Wilson-Hilferty elsewhere.
double chi_square_quantile_999(int dof);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    // Standard error of the slope propagated from per-point sigmas
    // (delta method); zero when sigmas are absent.
    double slope_se = 0.0;
};

// Ordinary least squares for y ~ intercept + slope * x. `sigma_y` may be
// empty; otherwise it holds one standard deviation per point, used only for
// the slope standard error, not for weighting.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& sigma_y = {});

// Value v minimizing sum_i w_i |x_i - v|. For an even weight split the lower
// optimal point is returned. Pairs are (value, weight), weights >= 0.
double weighted_median(std::vector<std::pair<double, double>> samples);

// Smallest value v such that the w-mass of {x_i <= v} reaches q * total.
double weighted_quantile(std::vector<std::pair<double, double>> samples, double q);

} // namespace hml
