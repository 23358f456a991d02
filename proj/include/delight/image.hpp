// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "delight/common.hpp"
#include "delight/tensor.hpp"

namespace delight {

// Plain CHW raster (no autodiff). Values are nominally in [0,1] for images.
struct Raster {
    int c = 0, h = 0, w = 0;
    std::vector<real> v;

    Raster() = default;
    Raster(int c_, int h_, int w_, real fill = 0.0)
        : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, fill) {}

    real& at(int ch, int i, int j) { return v[(static_cast<std::size_t>(ch) * h + i) * w + j]; }
    real at(int ch, int i, int j) const { return v[(static_cast<std::size_t>(ch) * h + i) * w + j]; }
    std::size_t size() const { return v.size(); }

    Tensor tensor() const { return Tensor::from({c, h, w}, v); }
    static Raster from_tensor(const Tensor& t) {
        check(t.shape().size() == 3, "Raster::from_tensor: expect [C,H,W]");
        Raster r;
        r.c = t.shape()[0];
        r.h = t.shape()[1];
        r.w = t.shape()[2];
        r.v = t.data();
        return r;
    }
};

// Rounds to the 8-bit grid in place (the persistence precision of PNG files).
Raster quantize8(const Raster& img);

// 8-bit PNG I/O. 3-channel rasters as RGB, 1-channel as grayscale.
void write_png(const std::string& path, const Raster& img);
Raster read_png(const std::string& path);

} // namespace delight
