#include "volcascade/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace volcascade {

double mean(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean: empty input");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
    if (v.size() < 2) throw std::invalid_argument("variance: need at least 2 samples");
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / static_cast<double>(v.size() - 1);
}

double stdev(std::span<const double> v) { return std::sqrt(variance(v)); }

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile: empty input");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0,1]");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    if (i + 1 < v.size()) return v[i] * (1.0 - frac) + v[i + 1] * frac;
    return v[i];
}

namespace {

LineFit line_from_design(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& w, bool known_variance) {
    const auto n = x.size();
    Eigen::MatrixXd X(n, 2);
    X.col(0).setOnes();
    X.col(1) = x;
    Eigen::MatrixXd XtW = X.transpose() * w.asDiagonal();
    Eigen::Matrix2d A = XtW * X;
    Eigen::Vector2d b = XtW * y;
    Eigen::Matrix2d Ainv = A.inverse();
    Eigen::Vector2d beta = Ainv * b;
    Eigen::VectorXd resid = y - X * beta;
    const double rss = (w.array() * resid.array().square()).sum();

    Eigen::Matrix2d cov = Ainv;
    if (!known_variance) {
        if (n <= 2) throw std::invalid_argument("fit_line: need > 2 points for errors");
        cov *= rss / static_cast<double>(n - 2);
    }
    LineFit f;
    f.intercept = beta(0);
    f.slope = beta(1);
    f.intercept_se = std::sqrt(std::max(cov(0, 0), 0.0));
    f.slope_se = std::sqrt(std::max(cov(1, 1), 0.0));
    f.rss = rss;
    f.n = static_cast<std::size_t>(n);
    return f;
}

}  // namespace

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 matched points");
    Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
    Eigen::VectorXd w = Eigen::VectorXd::Ones(xv.size());
    if ((xv.array() - xv(0)).abs().maxCoeff() == 0.0)
        throw std::invalid_argument("fit_line: singular design (single distinct x)");
    return line_from_design(xv, yv, w, false);
}

LineFit fit_line_weighted(std::span<const double> x, std::span<const double> y,
                          std::span<const double> se) {
    if (x.size() != y.size() || x.size() != se.size() || x.size() < 2)
        throw std::invalid_argument("fit_line_weighted: need >= 2 matched points");
    Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
    Eigen::VectorXd w(xv.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (se[i] <= 0.0) throw std::invalid_argument("fit_line_weighted: non-positive se");
        w(i) = 1.0 / (se[i] * se[i]);
    }
    if ((xv.array() - xv(0)).abs().maxCoeff() == 0.0)
        throw std::invalid_argument("fit_line_weighted: singular design (single distinct x)");
    return line_from_design(xv, yv, w, true);
}

namespace {

PolyFit poly_from_design(std::span<const double> x, std::span<const double> y,
                         const Eigen::VectorXd& w, int degree, bool known_variance) {
    const auto n = static_cast<Eigen::Index>(x.size());
    const int k = degree + 1;
    Eigen::MatrixXd X(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        double p = 1.0;
        for (int j = 0; j < k; ++j) {
            X(i, j) = p;
            p *= x[i];
        }
    }
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
    Eigen::MatrixXd XtW = X.transpose() * w.asDiagonal();
    Eigen::MatrixXd A = XtW * X;
    Eigen::VectorXd beta = A.ldlt().solve(XtW * yv);
    Eigen::VectorXd resid = yv - X * beta;
    const double rss = (w.array() * resid.array().square()).sum();
    Eigen::MatrixXd cov = A.inverse();
    if (!known_variance) {
        if (n <= k) throw std::invalid_argument("fit_poly: too few points for errors");
        cov *= rss / static_cast<double>(n - k);
    }
    PolyFit f;
    f.coeff.resize(k);
    f.coeff_se.resize(k);
    for (int j = 0; j < k; ++j) {
        f.coeff[j] = beta(j);
        f.coeff_se[j] = std::sqrt(std::max(cov(j, j), 0.0));
    }
    f.rss = rss;
    f.n = static_cast<std::size_t>(n);
    return f;
}

}  // namespace

PolyFit fit_poly(std::span<const double> x, std::span<const double> y, int degree) {
    if (x.size() != y.size() || static_cast<int>(x.size()) < degree + 1)
        throw std::invalid_argument("fit_poly: too few points");
    Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(x.size()));
    return poly_from_design(x, y, w, degree, false);
}

PolyFit fit_poly_weighted(std::span<const double> x, std::span<const double> y,
                          std::span<const double> se, int degree) {
    if (x.size() != y.size() || x.size() != se.size() ||
        static_cast<int>(x.size()) < degree + 1)
        throw std::invalid_argument("fit_poly_weighted: too few points");
    Eigen::VectorXd w(static_cast<Eigen::Index>(x.size()));
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (se[i] <= 0.0) throw std::invalid_argument("fit_poly_weighted: non-positive se");
        w(i) = 1.0 / (se[i] * se[i]);
    }
    return poly_from_design(x, y, w, degree, true);
}

namespace {

// Counts swaps performed by merge sort; equals the number of discordant pairs.
std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& buf,
                          std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += mid - i;
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + static_cast<long>(lo), buf.begin() + static_cast<long>(hi),
              v.begin() + static_cast<long>(lo));
    return swaps;
}

std::uint64_t tie_pairs(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::uint64_t t = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        const std::uint64_t run = j - i;
        t += run * (run - 1) / 2;
        i = j;
    }
    return t;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("kendall_tau: need >= 2 pairs");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];

    // Joint ties (same x and y) and ties in x alone.
    std::uint64_t t_xy = 0, t_x = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && x[idx[j]] == x[idx[i]]) ++j;
        const std::uint64_t run = j - i;
        t_x += run * (run - 1) / 2;
        std::size_t a = i;
        while (a < j) {
            std::size_t b = a;
            while (b < j && ys[b] == ys[a]) ++b;
            const std::uint64_t r2 = b - a;
            t_xy += r2 * (r2 - 1) / 2;
            a = b;
        }
        i = j;
    }
    const std::uint64_t t_y = tie_pairs(ys);

    std::vector<double> buf(n);
    const std::uint64_t discordant = merge_count(ys, buf, 0, n);

    const std::uint64_t n_pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const double num = static_cast<double>(n_pairs) - static_cast<double>(t_x) -
                       static_cast<double>(t_y) + static_cast<double>(t_xy) -
                       2.0 * static_cast<double>(discordant);
    const double den = std::sqrt((static_cast<double>(n_pairs) - static_cast<double>(t_x)) *
                                 (static_cast<double>(n_pairs) - static_cast<double>(t_y)));
    if (den == 0.0) throw std::invalid_argument("kendall_tau: degenerate input");
    return num / den;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

Histogram histogram_density(std::span<const double> samples, double lo, double hi,
                            std::size_t n_bins) {
    if (samples.empty()) throw std::invalid_argument("histogram_density: empty input");
    if (!(hi > lo) || n_bins == 0) throw std::invalid_argument("histogram_density: bad range");
    Histogram h;
    h.bin_width = (hi - lo) / static_cast<double>(n_bins);
    h.centers.resize(n_bins);
    h.density.assign(n_bins, 0.0);
    h.n_total = samples.size();
    for (std::size_t b = 0; b < n_bins; ++b)
        h.centers[b] = lo + (static_cast<double>(b) + 0.5) * h.bin_width;
    for (double x : samples) {
        if (x < lo || x >= hi) continue;
        const auto b = static_cast<std::size_t>((x - lo) / h.bin_width);
        h.density[std::min(b, n_bins - 1)] += 1.0;
        ++h.n_in_range;
    }
    const double norm = 1.0 / (static_cast<double>(h.n_total) * h.bin_width);
    for (double& d : h.density) d *= norm;
    return h;
}

double l1_distance(std::span<const double> p, std::span<const double> q, double dx) {
    if (p.size() != q.size()) throw std::invalid_argument("l1_distance: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
    return acc * dx;
}

}  // namespace volcascade
