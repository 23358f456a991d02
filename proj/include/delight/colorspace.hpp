// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "delight/common.hpp"

namespace delight {

// sRGB (D65) <-> CIE L*a*b*. Inputs/outputs: RGB in [0,1], L* in [0,100].

struct Lab {
    real L = 0, a = 0, b = 0;
};

Lab srgb_to_lab(real r, real g, real b);
std::array<real, 3> lab_to_srgb(const Lab& lab);

} // namespace delight
