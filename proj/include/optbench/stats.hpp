#pragma once

#include <span>
#include <vector>

namespace optbench {

/// Sample summary as reported in the descriptive-statistics tables:
/// sample (n-1) standard deviation, adjusted Fisher-Pearson skewness,
/// non-excess kurtosis (normal -> 3), type-7 interpolated quartiles.
struct SummaryStats {
    std::size_t n = 0;
    double mean = 0;
    double stddev = 0;
    double min = 0;
    double q25 = 0;
    double q50 = 0;
    double q75 = 0;
    double max = 0;
    double skewness = 0;
    double kurtosis = 0;
    bool degenerate = false; ///< zero variance: skewness/kurtosis undefined
};

SummaryStats summarize(std::span<const double> x);

double mean_of(std::span<const double> x);
double sample_variance(std::span<const double> x);
/// Linear-interpolation quantile (type 7), q in [0,1].
double quantile(std::vector<double> sorted_copy_taken_by_value, double q);

/// Autocorrelations rho_1..rho_nlags about the sample mean.
std::vector<double> autocorrelations(std::span<const double> x, std::size_t nlags);

/// Upper-tail chi-square probability P(X > q) with k degrees of freedom.
double chi_square_sf(double q, double k);
/// Upper-tail F probability with (d1, d2) degrees of freedom.
double f_dist_sf(double f, double d1, double d2);
/// Two-sided normal p-value for a z statistic.
double normal_two_sided_p(double z);

/// Standard normal CDF via erfc, |error| < 1e-15.
double norm_cdf(double x);
double norm_pdf(double x);

} // namespace optbench
