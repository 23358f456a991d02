// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "delight/image.hpp"
#include "delight/tensor.hpp"
#include "delight/warp.hpp"

namespace delight {

// Shading floor: SH lighting evaluated on a normal is clamped below at this
// value so downstream ratios stay finite.
constexpr real kShadeFloor = 1e-3;

// SH shading raster for a warp field. coeffs: [3,9]. Output [3,h,w]:
// max(floor, sum_k coeffs[c,k] * Y_k(n(p))) inside the mask, 0 outside.
// Differentiable w.r.t. coeffs.
Tensor shade(const WarpField& warp, const Tensor& coeffs);

// Bilinear texture lookup at the warp's UV coordinates, 0 outside the mask,
// clamp-to-border at texture edges. tex: [3,th,tw] -> [3,h,w].
// Differentiable w.r.t. tex.
Tensor warp_uv_to_image(const Tensor& tex, const WarpField& warp);

// Bilinear lookup of an image at explicit continuous pixel coords (used to
// pull observations back into UV space). img: [c,h,w] -> [c,ih,iw].
Raster sample_image_at(const Raster& img, const InverseWarp& iw);

// Elementwise product clamped to [0,1]. Throws on shape mismatch.
Tensor lambertian_compose(const Tensor& albedo_warped, const Tensor& shading);

// Shades a UV texture in place on the texture grid (bakes lighting into a
// texture). normals from uv_normal_map. No autodiff needed on this path.
Raster shade_uv_texture(const Raster& albedo, const Raster& uv_normals, const Raster& light_coeffs);

// Raster convenience wrappers over the tensor path (same code, no grad).
Raster shade_raster(const WarpField& warp, const Raster& coeffs);
Raster render_image(const Raster& albedo_uv, const WarpField& warp, const Raster& coeffs);
Raster warp_raster(const Raster& tex, const WarpField& warp);

} // namespace delight
