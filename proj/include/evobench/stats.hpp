// stats.hpp - the descriptive statistics, Mann-Whitney U test, and polynomial
// fitting used by the experiment reports. Nothing more.
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace evobench::stats {

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

struct FitResult {
    std::size_t degree = 0;
    std::vector<double> coefficients; // highest degree first, size = degree + 1
    double rmse = 0.0;
};

// Median by the midpoint convention; q1/q3 are medians of the lower/upper
// halves, excluding the overall median element when n is odd.
Summary descriptive_summary(std::span<const double> values);

// Sort ascending, then average the first and last floor(n/2) elements.
// The middle element is dropped for odd n.
std::pair<double, double> half_means(std::span<const double> values);

struct MannWhitneyResult {
    double u;           // U statistic for sample a
    double p_two_sided; // normal approximation, tie-corrected, continuity-corrected
};

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Least-squares fit of the given degree; rmse is over the input points.
FitResult polyfit(std::span<const double> xs, std::span<const double> ys, std::size_t degree);

double eval_poly(const FitResult& fit, double x);

} // namespace evobench::stats
