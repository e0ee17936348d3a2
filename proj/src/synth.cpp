#include "volcascade/synth.hpp"

#include "volcascade/rng.hpp"
#include "volcascade/stats.hpp"
#include "volcascade/wavelet.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace volcascade {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Multiplies the return spectrum by |f|^(-delta), shifting every wavelet
// moment exponent by delta * q.
void fractional_tilt(std::vector<double>& returns, double delta) {
    const std::size_t n = returns.size();
    std::vector<std::complex<double>> hat(n / 2 + 1);
    fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), returns.data(),
                                         reinterpret_cast<fftw_complex*>(hat.data()),
                                         FFTW_ESTIMATE);
    fftw_plan inv = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                         reinterpret_cast<fftw_complex*>(hat.data()),
                                         returns.data(), FFTW_ESTIMATE);
    fftw_execute(fwd);
    hat[0] = 0.0;  // drop the mean; the wavelet is blind to it anyway
    for (std::size_t k = 1; k < hat.size(); ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(n);
        hat[k] *= std::pow(f, -delta);
    }
    fftw_execute(inv);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    const double norm = 1.0 / static_cast<double>(n);
    for (double& r : returns) r *= norm;
}

}  // namespace

SeriesPath synthesize_cascade_path(const ModelParams& params, std::size_t length,
                                   std::uint64_t seed) {
    params.validate();
    if (!is_power_of_two(length) || length < 8)
        throw std::invalid_argument("synthesize_cascade_path: length must be a power of two");

    const auto n_levels = static_cast<std::size_t>(std::lround(std::log2(length)));
    const double v = 4.0 * std::log(2.0) * params.sigma_M2;  // log-multiplier variance
    const double m = -0.5 * v;                               // E(multiplier) = 1

    // log sigma^2 per sample, accumulated over the dyadic refinement.
    std::vector<double> log_var(length, 0.0);
    auto rng = make_stream(seed, 0);
    std::normal_distribution<double> n01(0.0, 1.0);
    if (v > 0.0) {
        const double sd = std::sqrt(v);
        for (std::size_t level = 1; level <= n_levels; ++level) {
            const std::size_t cells = std::size_t{1} << level;
            const std::size_t width = length / cells;
            for (std::size_t c = 0; c < cells; ++c) {
                const double g = m + sd * n01(rng);
                for (std::size_t k = c * width; k < (c + 1) * width; ++k) log_var[k] += g;
            }
        }
    }

    std::vector<double> returns(length);
    for (std::size_t k = 0; k < length; ++k)
        returns[k] = std::exp(0.5 * log_var[k]) * n01(rng);

    // The block-sum construction pins the linear exponent at 1/2 + sigma^2;
    // tilt the spectrum to reach gamma_M + sigma^2/2.
    const double delta = params.gamma_M + 0.5 * params.sigma_M2 - 0.5 - params.sigma_M2;
    if (std::abs(delta) > 1e-12) fractional_tilt(returns, delta);

    const double sd_emp = stdev(returns);
    if (!(sd_emp > 0.0)) throw std::runtime_error("synthesize_cascade_path: degenerate path");
    const double amplitude = params.prefactor / mexican_hat_brownian_prefactor();
    const double scale = amplitude / sd_emp;

    SeriesPath path;
    path.dt_minutes = 1.0;
    path.values.resize(length);
    double z = 0.0;
    for (std::size_t k = 0; k < length; ++k) {
        z += returns[k] * scale;
        path.values[k] = z;
    }
    return path;
}

}  // namespace volcascade
