// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#include "delight/colorspace.hpp"

#include <cmath>

namespace delight {

namespace {

constexpr real kXn = 0.95047, kYn = 1.0, kZn = 1.08883; // D65 reference white
constexpr real kDelta = 6.0 / 29.0;

real srgb_decode(real c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

real srgb_encode(real c) {
    return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

real lab_f(real t) {
    return t > kDelta * kDelta * kDelta ? std::cbrt(t)
                                        : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

real lab_f_inv(real t) {
    return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

} // namespace

Lab srgb_to_lab(real r, real g, real b) {
    real rl = srgb_decode(r), gl = srgb_decode(g), bl = srgb_decode(b);
    real x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
    real y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    real z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
    real fx = lab_f(x / kXn), fy = lab_f(y / kYn), fz = lab_f(z / kZn);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

std::array<real, 3> lab_to_srgb(const Lab& lab) {
    real fy = (lab.L + 16.0) / 116.0;
    real fx = fy + lab.a / 500.0;
    real fz = fy - lab.b / 200.0;
    real x = kXn * lab_f_inv(fx);
    real y = kYn * lab_f_inv(fy);
    real z = kZn * lab_f_inv(fz);
    real rl = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
    real gl = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
    real bl = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
    auto clamp01 = [](real v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); };
    return {clamp01(srgb_encode(rl)), clamp01(srgb_encode(gl)), clamp01(srgb_encode(bl))};
}

} // namespace delight
