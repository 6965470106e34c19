#pragma once

#include <utility>

#include "dbmid/blur_kernel.hpp"
#include "dbmid/image.hpp"

namespace dbmid {

enum class InitialKernel { Uniform, Gaussian };

struct DeconvConfig {
    int iterations = 30;
    int kernel_size_guess = 15;  // blind only, odd and >= 3
    InitialKernel initial_kernel = InitialKernel::Uniform;
    bool clip_negatives = true;

    void validate() const;
};

// Non-blind Richardson-Lucy deconvolution with a known kernel. Multiplicative
// updates per channel in double precision, reflect boundary; the result is
// clamped to [0,1] once at the end. A zero image is returned unchanged.
Image richardson_lucy(const Image& image, const BlurKernel& kernel,
                      const DeconvConfig& cfg);

// Blind deconvolution: alternating RL updates of the latent image and the
// kernel (estimated on luminance, re-normalized and clipped each outer
// iteration), then a final non-blind pass per channel with the estimate.
std::pair<Image, BlurKernel> blind_deconvolve(const Image& image,
                                              const DeconvConfig& cfg);

}  // namespace dbmid
