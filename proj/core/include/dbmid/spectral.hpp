#pragma once

#include <optional>

#include "dbmid/image.hpp"

namespace dbmid {

// Fourier-domain blur signature of an image. A 1-D uniform motion streak of
// length L multiplies the spectrum by a periodic-sinc along the motion axis,
// leaving fringes with nulls every W/L frequency bins; defocus disks ring
// isotropically instead.
struct SpectralFeatures {
    // Periodic-fringe strength along the horizontal / vertical frequency
    // axis, scaled by total spectral energy (so a brightness scale of c
    // multiplies both by c^2). Horizontal motion produces horizontal fringes.
    double fringe_energy_h = 0.0;
    double fringe_energy_v = 0.0;
    // Fraction of (non-DC) spectral energy above 0.25 cycles/px radially.
    double high_freq_ratio = 0.0;
    // Fringe spacing in frequency bins along the stronger axis; roughly
    // (axis length)/L for motion length L. Empty when no fringe dominates.
    std::optional<double> dominant_fringe_period_px;
};

// Computes features from the Hann-windowed 2-D power spectrum of the
// mean-subtracted luminance. Needs at least 64x64 input. A constant image
// yields all-zero features.
SpectralFeatures spectral_features(const Image& image);

}  // namespace dbmid
