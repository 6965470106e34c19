#pragma once

#include <cstdint>
#include <optional>

#include "dbmid/blur_kernel.hpp"
#include "dbmid/image.hpp"
#include "dbmid/rng.hpp"

namespace dbmid {

// Uniform 1-D motion kernel of the given length along the given axis. Weight
// is 1/length over `length` taps; even lengths are zero-padded by one tap so
// the kernel stays odd-sized and centered.
BlurKernel motion_kernel(int length_px, MotionDirection direction);

// Area-sampled (anti-aliased) disk of the given radius, normalized to sum 1.
// Each tap holds the fraction of its pixel cell covered by the disk,
// estimated on a 16x16 subgrid. radius 0 degenerates to the identity.
BlurKernel defocus_kernel(double radius_px);

// Full degradation recipe for one synthetic sample.
struct BlurSpec {
    BlurClass blur_class = BlurClass::InFocus;
    double defocus_radius_px = 0.0;
    int motion_length_px = 0;
    MotionDirection motion_direction = MotionDirection::Horizontal;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    // Throws ArgumentError unless the parameters match the class (e.g. a
    // motion sample must have zero defocus radius and a positive length).
    void validate() const;
};

// Applies the spec: motion blur, then defocus blur, then additive Gaussian
// noise drawn from the spec seed, then a clamp to [0, 1]. In-focus specs with
// zero noise return the input unchanged.
Image apply_blur(const Image& sharp, const BlurSpec& spec);

// Defocus radius induced at a stage offset of z micrometres from best focus:
// radius_px = 0.32 * |z_um|.
double defocus_radius_for_z(double z_um);

// Builds a focal stack around `sharp` at the given stage offsets by blurring
// each plane with the defocus radius its offset maps to.
FocalStack make_focal_stack(const Image& sharp, const std::vector<double>& z_offsets_um,
                            double noise_sigma, std::uint64_t seed);

}  // namespace dbmid
