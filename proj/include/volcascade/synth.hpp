#pragma once

#include "volcascade/cascade.hpp"
#include "volcascade/series.hpp"

#include <cstdint>

namespace volcascade {

/// Generates a path of length L (a power of two) whose wavelet moments
/// scale like the multiplicative model: exponent
/// (gamma_M + sigma_M2/2) q - sigma_M2 q^2 / 2 against s. Increments are
/// Gaussian with variances drawn from a dyadic log-normal cascade; a
/// spectral tilt adjusts the linear part of the exponent, and the
/// amplitude is calibrated so E(|W|) tracks prefactor * s^0.5 under the
/// mexican-hat transform. Deterministic given the seed.
SeriesPath synthesize_cascade_path(const ModelParams& params, std::size_t length,
                                   std::uint64_t seed);

}  // namespace volcascade
