#include "optbench/stats.hpp"

#include "optbench/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>

namespace optbench {

double mean_of(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double m = mean_of(x);
    double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(n - 1);
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

SummaryStats summarize(std::span<const double> x) {
    if (x.empty()) throw DataError("summarize: empty input");
    SummaryStats s;
    const double n = static_cast<double>(x.size());
    s.n = x.size();
    s.mean = mean_of(x);
    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : x) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.stddev = x.size() > 1 ? std::sqrt(m2 * n / (n - 1)) : 0.0;
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    s.q25 = quantile(sorted, 0.25);
    s.q50 = quantile(sorted, 0.50);
    s.q75 = quantile(sorted, 0.75);
    if (m2 <= 0 || x.size() < 3) {
        s.degenerate = true;
        return s;
    }
    // Adjusted Fisher-Pearson skewness and non-excess adjusted kurtosis,
    // the conventions behind the published summary tables.
    const double g1 = m3 / std::pow(m2, 1.5);
    s.skewness = std::sqrt(n * (n - 1)) / (n - 2) * g1;
    if (x.size() >= 4) {
        const double g2 = m4 / (m2 * m2) - 3.0;
        const double excess =
            (n - 1) / ((n - 2) * (n - 3)) * ((n + 1) * g2 + 6.0);
        s.kurtosis = excess + 3.0;
    } else {
        s.kurtosis = m4 / (m2 * m2);
    }
    return s;
}

std::vector<double> autocorrelations(std::span<const double> x, std::size_t nlags) {
    const std::size_t n = x.size();
    if (n < 2 || nlags >= n) throw DataError("autocorrelations: series too short");
    const double m = mean_of(x);
    double denom = 0;
    for (double v : x) denom += (v - m) * (v - m);
    if (denom <= 0) throw EstimationError("autocorrelations: constant series");
    std::vector<double> rho(nlags);
    for (std::size_t k = 1; k <= nlags; ++k) {
        double num = 0;
        for (std::size_t t = k; t < n; ++t) num += (x[t] - m) * (x[t - k] - m);
        rho[k - 1] = num / denom;
    }
    return rho;
}

double chi_square_sf(double q, double k) {
    if (q <= 0) return 1.0;
    boost::math::chi_squared dist(k);
    return boost::math::cdf(boost::math::complement(dist, q));
}

double f_dist_sf(double f, double d1, double d2) {
    if (f <= 0) return 1.0;
    boost::math::fisher_f dist(d1, d2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double normal_two_sided_p(double z) { return 2.0 * norm_cdf(-std::fabs(z)); }

} // namespace optbench
