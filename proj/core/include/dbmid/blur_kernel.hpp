#pragma once

#include <string>
#include <vector>

namespace dbmid {

enum class KernelKind { Identity, Defocus, Motion, Estimated };

enum class MotionDirection { Horizontal, Vertical };

const char* to_string(MotionDirection d);
MotionDirection motion_direction_from_string(const std::string& s);

// Normalized 2-D convolution kernel. Entries are non-negative, sum to 1
// within 1e-9, and both dimensions are odd.
struct BlurKernel {
    int kh = 1;
    int kw = 1;
    std::vector<double> m;  // row-major kh x kw
    KernelKind kind = KernelKind::Identity;

    double radius_px = 0.0;              // defocus
    int length_px = 0;                   // motion
    MotionDirection direction = MotionDirection::Horizontal;

    double at(int ky, int kx) const { return m[size_t(ky) * kw + kx]; }
    double& at(int ky, int kx) { return m[size_t(ky) * kw + kx]; }

    double sum() const;
    // Throws ArgumentError on violated invariants.
    void validate() const;
};

BlurKernel identity_kernel();

}  // namespace dbmid
