#pragma once

#include <utility>
#include <vector>

#include "dbmid/image.hpp"

namespace dbmid {

struct Shift {
    int dy = 0;
    int dx = 0;
};

// Integer-pixel translation of `moving` relative to `reference`, estimated by
// phase correlation on mean-subtracted luminance. A result of (dy, dx) means
// moving(y, x) ~= reference(y - dy, x - dx); translating `moving` by the
// negated shift aligns it to `reference`. Shifts are reported in
// [-dim/2, dim/2). Throws RegistrationError for constant inputs.
Shift register_translation(const Image& moving, const Image& reference);

// Circularly shifts an image by (dy, dx); used to undo an estimated shift.
Image shift_image(const Image& img, int dy, int dx);

// Registers every plane of a focal stack to the in-focus plane. Returns one
// shift per plane (zero for the reference itself).
std::vector<Shift> register_stack(const FocalStack& stack);

}  // namespace dbmid
