#include "volcascade/wavelet.hpp"

#include "volcascade/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace volcascade {

double AnalyzingWavelet::psi(double t) const {
    if (kind != WaveletKind::mexican_hat)
        throw std::logic_error("psi: pointwise values only defined for the mexican hat");
    return (t * t - 1.0) * std::exp(-0.5 * t * t);
}

namespace {

constexpr double kQuadStep = 5e-4;

double quad_moment(const AnalyzingWavelet& w, int order) {
    const double r = w.support_radius;
    const auto n = static_cast<std::size_t>(std::ceil(2.0 * r / kQuadStep));
    const double h = 2.0 * r / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = -r + static_cast<double>(i) * h;
        const double f = (order == 0 ? 1.0 : t) * w.psi(t);
        acc += (i == 0 || i == n) ? 0.5 * f : f;
    }
    return acc * h;
}

}  // namespace

double psi_moment0(const AnalyzingWavelet& w) { return quad_moment(w, 0); }
double psi_moment1(const AnalyzingWavelet& w) { return quad_moment(w, 1); }

double mexican_hat_brownian_prefactor() {
    static const double value = [] {
        // Var(W) = -1/2 int int psi(a) psi(b) |a-b| da db for unit-rate
        // Brownian increments; E|W| = sqrt(2 Var / pi) for a Gaussian W.
        AnalyzingWavelet w;
        const double r = w.support_radius;
        const std::size_t n = 2800;
        const double h = 2.0 * r / static_cast<double>(n);
        std::vector<double> psi_v(n + 1), t_v(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            t_v[i] = -r + static_cast<double>(i) * h;
            psi_v[i] = w.psi(t_v[i]) * ((i == 0 || i == n) ? 0.5 : 1.0);
        }
        double acc = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j <= n; ++j)
                row += psi_v[j] * std::abs(t_v[i] - t_v[j]);
            acc += psi_v[i] * row;
        }
        const double kappa = -0.5 * acc * h * h;
        return std::sqrt(2.0 * kappa / M_PI);
    }();
    return value;
}

ScaleGrid ScaleGrid::geometric(double s_min, double s_max, std::size_t count,
                               std::size_t path_length) {
    if (!(s_min > 0.0) || !(s_max > s_min) || count < 2)
        throw std::invalid_argument("ScaleGrid: need 0 < s_min < s_max and count >= 2");
    ScaleGrid g;
    g.path_length = path_length;
    g.scales.resize(count);
    g.lambdas.resize(count);
    const double ratio = std::log(s_max / s_min) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        g.scales[i] = s_min * std::exp(ratio * static_cast<double>(i));
        g.lambdas[i] = std::log(static_cast<double>(path_length) / g.scales[i]);
    }
    return g;
}

namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Marks positions closer than `radius` samples to a path end or break.
void fill_valid_mask(std::vector<std::uint8_t>& valid,
                     const std::vector<std::size_t>& breaks, long radius, long length) {
    std::fill(valid.begin(), valid.end(), std::uint8_t{1});
    for (long u = 0; u < std::min(radius, length); ++u) valid[static_cast<std::size_t>(u)] = 0;
    for (long u = std::max(length - radius, 0L); u < length; ++u)
        valid[static_cast<std::size_t>(u)] = 0;
    for (std::size_t b : breaks) {
        const long lo = std::max(static_cast<long>(b) - radius, 0L);
        const long hi = std::min(static_cast<long>(b) + radius, length - 1);
        for (long u = lo; u <= hi; ++u) valid[static_cast<std::size_t>(u)] = 0;
    }
}

struct FftWorkspace {
    std::size_t n = 0;
    std::vector<double> real;
    std::vector<std::complex<double>> signal_hat;
    std::vector<std::complex<double>> kernel_hat;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    explicit FftWorkspace(std::size_t size) : n(size) {
        real.assign(n, 0.0);
        signal_hat.assign(n / 2 + 1, {0.0, 0.0});
        kernel_hat.assign(n / 2 + 1, {0.0, 0.0});
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(),
                                   reinterpret_cast<fftw_complex*>(kernel_hat.data()),
                                   FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                   reinterpret_cast<fftw_complex*>(kernel_hat.data()),
                                   real.data(), FFTW_ESTIMATE);
    }
    ~FftWorkspace() {
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
    }
    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;
};

}  // namespace

WaveletField cwt(const SeriesPath& path, const ScaleGrid& grid,
                 const AnalyzingWavelet& wavelet, double fft_threshold) {
    const std::size_t length = path.values.size();
    if (grid.path_length != length)
        throw std::invalid_argument("cwt: scale grid built for a different path length");
    if (grid.scales.empty()) throw std::invalid_argument("cwt: empty scale grid");
    const double s_max = grid.scales.back();
    if (s_max > static_cast<double>(length) / 8.0)
        throw std::invalid_argument("cwt: max scale exceeds L/8 precondition");
    const long r_min =
        static_cast<long>(std::ceil(wavelet.support_radius * grid.scales.front()));
    if (static_cast<long>(length) < 2 * r_min + 1)
        throw std::invalid_argument("cwt: path shorter than twice the wavelet support");

    WaveletField field;
    field.grid = grid;
    field.wavelet = wavelet;
    field.coeffs.assign(grid.size(), std::vector<double>(length, 0.0));
    field.valid.assign(grid.size(), std::vector<std::uint8_t>(length, 0));

    const std::span<const double> z(path.values);

    if (wavelet.kind == WaveletKind::delta_difference) {
        for (std::size_t si = 0; si < grid.size(); ++si) {
            const long lag = std::max<long>(1, std::lround(grid.scales[si]));
            auto& row = field.coeffs[si];
            for (long u = 0; u + lag < static_cast<long>(length); ++u)
                row[static_cast<std::size_t>(u)] =
                    z[static_cast<std::size_t>(u + lag)] - z[static_cast<std::size_t>(u)];
            fill_valid_mask(field.valid[si], path.session_breaks, lag,
                            static_cast<long>(length));
        }
        return field;
    }

    // FFT workspace sized for the largest kernel; the signal transform is
    // shared across all FFT scales.
    const long r_max = static_cast<long>(std::ceil(wavelet.support_radius * s_max));
    const std::size_t n_fft = next_pow2(length + 2 * static_cast<std::size_t>(r_max) + 2);
    FftWorkspace ws(n_fft);
    bool have_signal_hat = false;

    for (std::size_t si = 0; si < grid.size(); ++si) {
        const double s = grid.scales[si];
        const long radius = static_cast<long>(std::ceil(wavelet.support_radius * s));
        std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
        for (long k = -radius; k <= radius; ++k)
            kernel[static_cast<std::size_t>(k + radius)] =
                wavelet.psi(static_cast<double>(k) / s) / s;

        auto& row = field.coeffs[si];
        if (s <= fft_threshold) {
            // Direct correlation, skipping positions whose support leaves the path.
#pragma omp parallel for schedule(static)
            for (long u = radius; u < static_cast<long>(length) - radius; ++u) {
                double acc = 0.0;
                const double* zp = z.data() + (u - radius);
                for (long k = 0; k <= 2 * radius; ++k)
                    acc += zp[k] * kernel[static_cast<std::size_t>(k)];
                row[static_cast<std::size_t>(u)] = acc;
            }
        } else {
            if (!have_signal_hat) {
                std::fill(ws.real.begin(), ws.real.end(), 0.0);
                std::copy(z.begin(), z.end(), ws.real.begin());
                fftw_execute_dft_r2c(ws.fwd, ws.real.data(),
                                     reinterpret_cast<fftw_complex*>(ws.signal_hat.data()));
                have_signal_hat = true;
            }
            // Correlation: kernel at positive offsets k stored at index k,
            // negative offsets wrapped to the top of the buffer.
            std::fill(ws.real.begin(), ws.real.end(), 0.0);
            for (long k = 0; k <= radius; ++k)
                ws.real[static_cast<std::size_t>(k)] =
                    kernel[static_cast<std::size_t>(k + radius)];
            for (long k = 1; k <= radius; ++k)
                ws.real[ws.n - static_cast<std::size_t>(k)] =
                    kernel[static_cast<std::size_t>(radius - k)];
            fftw_execute_dft_r2c(ws.fwd, ws.real.data(),
                                 reinterpret_cast<fftw_complex*>(ws.kernel_hat.data()));
            for (std::size_t i = 0; i < ws.kernel_hat.size(); ++i)
                ws.kernel_hat[i] = ws.signal_hat[i] * std::conj(ws.kernel_hat[i]);
            fftw_execute_dft_c2r(ws.inv,
                                 reinterpret_cast<fftw_complex*>(ws.kernel_hat.data()),
                                 ws.real.data());
            const double norm = 1.0 / static_cast<double>(ws.n);
            for (std::size_t u = 0; u < length; ++u) row[u] = ws.real[u] * norm;
        }
        fill_valid_mask(field.valid[si], path.session_breaks, radius,
                        static_cast<long>(length));
    }
    return field;
}

VolatilitySeries volatility_series(const WaveletField& field, std::size_t scale_index) {
    if (scale_index >= field.grid.size())
        throw std::out_of_range("volatility_series: scale index out of range");
    VolatilitySeries vs;
    const auto& row = field.coeffs[scale_index];
    const auto& valid = field.valid[scale_index];
    for (std::size_t u = 0; u < row.size(); ++u) {
        if (!valid[u]) continue;
        vs.x.push_back(std::abs(row[u]));
        vs.positions.push_back(u);
    }
    vs.empty = vs.x.empty();
    return vs;
}

MomentScaling moment_scaling(const WaveletField& field, std::span<const double> qs,
                             double fit_s_min, double fit_s_max) {
    std::vector<double> log_s;
    std::vector<std::size_t> rows;
    for (std::size_t si = 0; si < field.grid.size(); ++si) {
        const double s = field.grid.scales[si];
        if (s < fit_s_min || s > fit_s_max) continue;
        log_s.push_back(std::log(s));
        rows.push_back(si);
    }
    if (log_s.size() < 4)
        throw std::invalid_argument("moment_scaling: need at least 4 scales in fit range");

    MomentScaling out;
    for (double q : qs) {
        if (q < 0.0) throw std::invalid_argument("moment_scaling: q must be >= 0");
        std::vector<double> log_m;
        log_m.reserve(rows.size());
        for (std::size_t si : rows) {
            const auto vs = volatility_series(field, si);
            if (vs.empty)
                throw std::runtime_error("moment_scaling: no valid coefficients at scale " +
                                         std::to_string(field.grid.scales[si]));
            double acc = 0.0;
            for (double x : vs.x) acc += std::pow(x, q);
            acc /= static_cast<double>(vs.x.size());
            if (!(acc > 0.0))
                throw std::runtime_error("moment_scaling: non-positive moment at scale " +
                                         std::to_string(field.grid.scales[si]));
            log_m.push_back(std::log(acc));
        }
        const LineFit fit = fit_line(log_s, log_m);
        out.q.push_back(q);
        out.exponent.push_back(q == 0.0 ? 0.0 : fit.slope);
        out.se.push_back(fit.slope_se);
        out.intercept.push_back(fit.intercept);
    }
    return out;
}

}  // namespace volcascade
