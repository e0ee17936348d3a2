#pragma once

#include "volcascade/series.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace volcascade {

enum class WaveletKind { mexican_hat, delta_difference };

/// Analyzing wavelet of the transform. The mexican_hat kernel is the
/// second derivative of a Gaussian, psi(t) = (t^2 - 1) exp(-t^2 / 2),
/// which is orthogonal to linear trends; delta_difference reproduces the
/// plain log return Z(u+s) - Z(u).
struct AnalyzingWavelet {
    WaveletKind kind = WaveletKind::mexican_hat;
    /// Truncation radius in multiples of s. At 7 the discarded Gaussian
    /// tail keeps the 0th-moment quadrature below 1e-8.
    double support_radius = 7.0;

    double psi(double t) const;
};

/// Fine-quadrature moments of the truncated kernel; both must vanish for
/// the mexican hat.
double psi_moment0(const AnalyzingWavelet& w);
double psi_moment1(const AnalyzingWavelet& w);

/// E(|W|)/sqrt(s) for a unit-variance-increment Brownian path analyzed
/// with the mexican hat; used to calibrate synthetic paths.
double mexican_hat_brownian_prefactor();

/// Geometric grid of analysis scales with the matching lambda = log(L/s).
struct ScaleGrid {
    std::vector<double> scales;
    std::vector<double> lambdas;
    std::size_t path_length = 0;

    static ScaleGrid geometric(double s_min, double s_max, std::size_t count,
                               std::size_t path_length);
    std::size_t size() const { return scales.size(); }
};

/// Wavelet coefficients W[u, s] with a per-entry validity mask. Entries
/// within support_radius * s of a path end or a session break are invalid.
struct WaveletField {
    std::vector<std::vector<double>> coeffs;        // [scale][position]
    std::vector<std::vector<std::uint8_t>> valid;   // [scale][position]
    ScaleGrid grid;
    AnalyzingWavelet wavelet;

    std::size_t n_positions() const { return coeffs.empty() ? 0 : coeffs[0].size(); }
};

/// Continuous wavelet transform with L1 normalization,
/// W[u,s] = sum_t Z(t) (1/s) psi((t-u)/s). Direct convolution at small
/// scales, FFT convolution above fft_threshold samples.
WaveletField cwt(const SeriesPath& path, const ScaleGrid& grid,
                 const AnalyzingWavelet& wavelet, double fft_threshold = 64.0);

/// |W| over the valid positions of one scale row.
struct VolatilitySeries {
    std::vector<double> x;
    std::vector<std::size_t> positions;
    bool empty = true;
};

VolatilitySeries volatility_series(const WaveletField& field, std::size_t scale_index);

/// Log-log slope of E(|W|^q) against s per moment order q.
struct MomentScaling {
    std::vector<double> q;
    std::vector<double> exponent;
    std::vector<double> se;
    std::vector<double> intercept;  // log E(|W|^q) at log s = 0
};

MomentScaling moment_scaling(const WaveletField& field, std::span<const double> qs,
                             double fit_s_min = 0.0, double fit_s_max = 1e300);

}  // namespace volcascade
