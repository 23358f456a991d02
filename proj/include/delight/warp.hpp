// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "delight/common.hpp"
#include "delight/image.hpp"

namespace delight {

// Per-view warp field on the image grid: UV lookup coordinates, unit surface
// normals in view space, and a visibility mask. Derived from an ellipsoid
// head proxy so warping stays differentiable without a mesh rasterizer.
struct WarpField {
    int h = 0, w = 0;
    std::vector<real> uv;      // [h,w,2] in [0,1]
    std::vector<real> normals; // [h,w,3] unit where mask=1
    std::vector<real> mask;    // [h,w] in {0,1}
    std::vector<real> basis;   // [9,h,w] SH basis per pixel (derived, not persisted)

    void compute_basis();
};

// UV-space companion data for one view: where each texel lands in the image
// and whether it is observed there.
struct InverseWarp {
    int h = 0, w = 0;      // texture grid
    std::vector<real> xy;  // [h,w,2] pixel coordinates (continuous)
    std::vector<real> vis; // [h,w] in {0,1}
};

struct ViewSpec {
    std::string name;
    real yaw_deg = 0.0;
    real pitch_deg = 0.0;
};

// Fixed bank: frontal, +/-yaw, +/-pitch.
std::vector<ViewSpec> default_view_bank();

WarpField build_warp(const ViewSpec& view, int h, int w);
InverseWarp build_inverse_warp(const ViewSpec& view, int tex_h, int tex_w, int img_h, int img_w);

// Unit normals of the head proxy on the texture grid, [3,h,w]; used to bake
// lighting into UV textures.
Raster uv_normal_map(int tex_h, int tex_w);

// Broad elliptical region of the texture treated as skin for metrics.
Raster uv_skin_mask(int tex_h, int tex_w);

void save_warp(const std::string& dir, const std::string& stem, const WarpField& wf);
WarpField load_warp(const std::string& dir, const std::string& stem);

} // namespace delight
