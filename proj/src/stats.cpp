#include "evobench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evobench::stats {

namespace {

double median_of(const std::vector<double>& sorted, std::size_t lo, std::size_t hi) {
    const std::size_t n = hi - lo;
    const std::size_t mid = lo + n / 2;
    if (n % 2 == 1) return sorted[mid];
    return 0.5 * (sorted[mid - 1] + sorted[mid]);
}

} // namespace

Summary descriptive_summary(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("descriptive_summary: empty input");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    Summary s;
    s.n = n;
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    s.min = sorted.front();
    s.max = sorted.back();
    s.median = median_of(sorted, 0, n);
    if (n == 1) {
        s.q1 = s.q3 = sorted[0];
    } else {
        const std::size_t half = n / 2;
        s.q1 = median_of(sorted, 0, half);
        s.q3 = median_of(sorted, n - half, n); // skips the median element for odd n
    }
    return s;
}

std::pair<double, double> half_means(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("half_means: need at least two values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t half = sorted.size() / 2;
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        lo += sorted[i];
        hi += sorted[sorted.size() - half + i];
    }
    return {lo / static_cast<double>(half), hi / static_cast<double>(half)};
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    const std::size_t n = na + nb;

    struct Entry {
        double value;
        bool from_a;
    };
    std::vector<Entry> pooled;
    pooled.reserve(n);
    for (double v : a) pooled.push_back({v, true});
    for (double v : b) pooled.push_back({v, false});
    std::sort(pooled.begin(), pooled.end(),
              [](const Entry& x, const Entry& y) { return x.value < y.value; });

    // Midranks, accumulating the tie correction term sum(t^3 - t).
    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && pooled[j].value == pooled[i].value) ++j;
        const double t = static_cast<double>(j - i);
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) {
            if (pooled[k].from_a) rank_sum_a += midrank;
        }
        tie_term += t * t * t - t;
        i = j;
    }

    const double dna = static_cast<double>(na);
    const double dnb = static_cast<double>(nb);
    const double u_a = rank_sum_a - dna * (dna + 1.0) / 2.0;

    MannWhitneyResult r;
    r.u = u_a;

    const double mean_u = dna * dnb / 2.0;
    const double dn = static_cast<double>(n);
    const double variance =
        dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (variance <= 0.0) {
        // All pooled values identical.
        r.p_two_sided = 1.0;
        return r;
    }
    double z = std::abs(u_a - mean_u) - 0.5; // continuity correction
    if (z < 0.0) z = 0.0;
    z /= std::sqrt(variance);
    r.p_two_sided = std::erfc(z / std::sqrt(2.0));
    if (r.p_two_sided > 1.0) r.p_two_sided = 1.0;
    return r;
}

FitResult polyfit(std::span<const double> xs, std::span<const double> ys, std::size_t degree) {
    if (xs.size() != ys.size()) throw std::invalid_argument("polyfit: x/y size mismatch");
    const std::size_t m = degree + 1;
    if (xs.size() < m) throw std::invalid_argument("polyfit: underdetermined system");
    const bool all_same = std::all_of(xs.begin(), xs.end(),
                                      [&](double x) { return x == xs[0]; });
    if (degree >= 1 && all_same) throw std::invalid_argument("polyfit: degenerate x values");

    // Normal equations A c = b over monomial moments, in extended precision.
    std::vector<long double> a(m * m, 0.0L);
    std::vector<long double> b(m, 0.0L);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        long double pow_i = 1.0L;
        std::vector<long double> powers(2 * m - 1);
        for (std::size_t i = 0; i < 2 * m - 1; ++i) {
            powers[i] = pow_i;
            pow_i *= xs[k];
        }
        for (std::size_t i = 0; i < m; ++i) {
            b[i] += powers[i] * static_cast<long double>(ys[k]);
            for (std::size_t j = 0; j < m; ++j) a[i * m + j] += powers[i + j];
        }
    }

    // Gaussian elimination with partial pivoting.
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < m; ++row) {
            if (std::abs(a[row * m + col]) > std::abs(a[pivot * m + col])) pivot = row;
        }
        if (a[pivot * m + col] == 0.0L) throw std::invalid_argument("polyfit: singular system");
        if (pivot != col) {
            for (std::size_t j = 0; j < m; ++j) std::swap(a[col * m + j], a[pivot * m + j]);
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t row = col + 1; row < m; ++row) {
            const long double factor = a[row * m + col] / a[col * m + col];
            for (std::size_t j = col; j < m; ++j) a[row * m + j] -= factor * a[col * m + j];
            b[row] -= factor * b[col];
        }
    }
    std::vector<long double> coeff_low_first(m);
    for (std::size_t i = m; i-- > 0;) {
        long double acc = b[i];
        for (std::size_t j = i + 1; j < m; ++j) acc -= a[i * m + j] * coeff_low_first[j];
        coeff_low_first[i] = acc / a[i * m + i];
    }

    FitResult fit;
    fit.degree = degree;
    fit.coefficients.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        fit.coefficients[i] = static_cast<double>(coeff_low_first[m - 1 - i]);
    }

    long double sq = 0.0L;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double r = ys[k] - eval_poly(fit, xs[k]);
        sq += static_cast<long double>(r) * r;
    }
    fit.rmse = std::sqrt(static_cast<double>(sq / static_cast<long double>(xs.size())));
    return fit;
}

double eval_poly(const FitResult& fit, double x) {
    double acc = 0.0;
    for (double c : fit.coefficients) acc = acc * x + c;
    return acc;
}

} // namespace evobench::stats
