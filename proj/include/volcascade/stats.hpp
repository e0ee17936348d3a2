#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace volcascade {

double mean(std::span<const double> v);
double variance(std::span<const double> v);  // unbiased
double stdev(std::span<const double> v);

/// Quantile with linear interpolation; q in [0, 1]. Sorts a copy.
double quantile(std::vector<double> v, double q);

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double intercept_se = 0.0;
    double slope_se = 0.0;
    double rss = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares of y on x; standard errors from residual variance.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Weighted least squares with known per-point standard errors:
/// weights 1/se^2, parameter covariance (X^T W X)^{-1}.
LineFit fit_line_weighted(std::span<const double> x, std::span<const double> y,
                          std::span<const double> se);

struct PolyFit {
    std::vector<double> coeff;     // ascending powers
    std::vector<double> coeff_se;
    double rss = 0.0;
    std::size_t n = 0;
};

PolyFit fit_poly(std::span<const double> x, std::span<const double> y, int degree);
PolyFit fit_poly_weighted(std::span<const double> x, std::span<const double> y,
                          std::span<const double> se, int degree);

/// Kendall's tau-b via Knight's O(n log n) algorithm.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// One-sample Kolmogorov-Smirnov statistic against a continuous cdf.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Histogram {
    std::vector<double> centers;
    std::vector<double> density;   // normalized by n_total, so mass can be < 1
    double bin_width = 0.0;
    std::size_t n_total = 0;
    std::size_t n_in_range = 0;
};

Histogram histogram_density(std::span<const double> samples, double lo, double hi,
                            std::size_t n_bins);

/// L1 distance of two densities sampled on the same uniform grid.
double l1_distance(std::span<const double> p, std::span<const double> q, double dx);

}  // namespace volcascade
