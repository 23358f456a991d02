// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#include "delight/sh.hpp"

#include <cmath>

namespace delight {

std::array<real, kShCount> sh_basis(real nx, real ny, real nz) {
    real len = std::sqrt(nx * nx + ny * ny + nz * nz);
    check(std::abs(len - 1.0) <= 1e-5, "sh_basis: normal is not unit length");
    return {
        kShY00,
        kShBand1 * ny,
        kShBand1 * nz,
        kShBand1 * nx,
        kShBand2xy * nx * ny,
        kShBand2xy * ny * nz,
        kShBand2zz * (3.0 * nz * nz - 1.0),
        kShBand2xy * nx * nz,
        kShBand2xx * (nx * nx - ny * ny),
    };
}

} // namespace delight
