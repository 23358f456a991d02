// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "delight/common.hpp"

namespace delight {

// Order-2 real spherical harmonics evaluated on a unit normal, in the order
// [Y00, Y1-1, Y10, Y11, Y2-2, Y2-1, Y20, Y21, Y22].
constexpr int kShCount = 9;

constexpr real kShY00 = 0.282095;
constexpr real kShBand1 = 0.488603;
constexpr real kShBand2xy = 1.092548;
constexpr real kShBand2zz = 0.315392;
constexpr real kShBand2xx = 0.546274;

// Throws if the normal is not unit length within 1e-5.
std::array<real, kShCount> sh_basis(real nx, real ny, real nz);

} // namespace delight
