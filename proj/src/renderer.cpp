// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#include "delight/renderer.hpp"

#include <cmath>

#include "delight/sh.hpp"

namespace delight {

Tensor shade(const WarpField& warp, const Tensor& coeffs) {
    check(coeffs.shape() == Shape{3, kShCount}, "shade: coeffs must be [3,9]");
    const int h = warp.h, w = warp.w;
    const std::size_t npix = static_cast<std::size_t>(h) * w;
    std::vector<real> out(3 * npix, 0.0);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t p = 0; p < npix; ++p) {
            if (warp.mask[p] < 0.5) continue;
            real s = 0.0;
            for (int k = 0; k < kShCount; ++k)
                s += coeffs.at(static_cast<std::size_t>(c) * kShCount + k) *
                     warp.basis[static_cast<std::size_t>(k) * npix + p];
            out[static_cast<std::size_t>(c) * npix + p] = std::max(kShadeFloor, s);
        }
    }
    auto pc = coeffs.node();
    const WarpField* wp = &warp; // warp fields outlive training graphs
    return make_op({3, h, w}, std::move(out), {coeffs}, [pc, wp, npix](TensorNode& o) {
        if (!pc->requires_grad) return;
        // grad flows only where the pre-clamp value is above the floor
        for (int c = 0; c < 3; ++c) {
            for (std::size_t p = 0; p < npix; ++p) {
                if (wp->mask[p] < 0.5) continue;
                std::size_t oi = static_cast<std::size_t>(c) * npix + p;
                if (o.val[oi] <= kShadeFloor) continue;
                real g = o.grad[oi];
                if (g == 0.0) continue;
                for (int k = 0; k < kShCount; ++k)
                    pc->grad[static_cast<std::size_t>(c) * kShCount + k] +=
                        g * wp->basis[static_cast<std::size_t>(k) * npix + p];
            }
        }
    });
}

Tensor warp_uv_to_image(const Tensor& tex, const WarpField& warp) {
    check(tex.shape().size() == 3, "warp_uv_to_image: tex must be [C,H,W]");
    const int tc = tex.shape()[0], th = tex.shape()[1], tw = tex.shape()[2];
    const int h = warp.h, w = warp.w;
    const std::size_t npix = static_cast<std::size_t>(h) * w;
    const std::size_t tpix = static_cast<std::size_t>(th) * tw;

    std::vector<real> out(static_cast<std::size_t>(tc) * npix, 0.0);
    for (std::size_t p = 0; p < npix; ++p) {
        if (warp.mask[p] < 0.5) continue;
        real x = warp.uv[p * 2] * (tw - 1);
        real y = warp.uv[p * 2 + 1] * (th - 1);
        x = std::min(static_cast<real>(tw - 1), std::max(0.0, x));
        y = std::min(static_cast<real>(th - 1), std::max(0.0, y));
        int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
        int x1 = std::min(x0 + 1, tw - 1), y1 = std::min(y0 + 1, th - 1);
        real fx = x - x0, fy = y - y0;
        real w00 = (1 - fx) * (1 - fy), w01 = fx * (1 - fy), w10 = (1 - fx) * fy, w11 = fx * fy;
        for (int c = 0; c < tc; ++c) {
            const real* t = tex.data().data() + static_cast<std::size_t>(c) * tpix;
            out[static_cast<std::size_t>(c) * npix + p] =
                w00 * t[static_cast<std::size_t>(y0) * tw + x0] +
                w01 * t[static_cast<std::size_t>(y0) * tw + x1] +
                w10 * t[static_cast<std::size_t>(y1) * tw + x0] +
                w11 * t[static_cast<std::size_t>(y1) * tw + x1];
        }
    }

    auto pt = tex.node();
    const WarpField* wp = &warp;
    return make_op({tc, h, w}, std::move(out), {tex},
                   [pt, wp, tc, th, tw, npix, tpix](TensorNode& o) {
                       if (!pt->requires_grad) return;
                       for (std::size_t p = 0; p < npix; ++p) {
                           if (wp->mask[p] < 0.5) continue;
                           real x = wp->uv[p * 2] * (tw - 1);
                           real y = wp->uv[p * 2 + 1] * (th - 1);
                           x = std::min(static_cast<real>(tw - 1), std::max(0.0, x));
                           y = std::min(static_cast<real>(th - 1), std::max(0.0, y));
                           int x0 = static_cast<int>(std::floor(x)),
                               y0 = static_cast<int>(std::floor(y));
                           int x1 = std::min(x0 + 1, tw - 1), y1 = std::min(y0 + 1, th - 1);
                           real fx = x - x0, fy = y - y0;
                           real w00 = (1 - fx) * (1 - fy), w01 = fx * (1 - fy),
                                w10 = (1 - fx) * fy, w11 = fx * fy;
                           for (int c = 0; c < tc; ++c) {
                               real g = o.grad[static_cast<std::size_t>(c) * npix + p];
                               if (g == 0.0) continue;
                               real* tg = pt->grad.data() + static_cast<std::size_t>(c) * tpix;
                               tg[static_cast<std::size_t>(y0) * tw + x0] += g * w00;
                               tg[static_cast<std::size_t>(y0) * tw + x1] += g * w01;
                               tg[static_cast<std::size_t>(y1) * tw + x0] += g * w10;
                               tg[static_cast<std::size_t>(y1) * tw + x1] += g * w11;
                           }
                       }
                   });
}

Raster sample_image_at(const Raster& img, const InverseWarp& iw) {
    Raster out(img.c, iw.h, iw.w);
    for (int i = 0; i < iw.h; ++i)
        for (int j = 0; j < iw.w; ++j) {
            std::size_t p = static_cast<std::size_t>(i) * iw.w + j;
            if (iw.vis[p] < 0.5) continue;
            real x = iw.xy[p * 2], y = iw.xy[p * 2 + 1];
            int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
            int x1 = std::min(x0 + 1, img.w - 1), y1 = std::min(y0 + 1, img.h - 1);
            real fx = x - x0, fy = y - y0;
            for (int c = 0; c < img.c; ++c) {
                out.at(c, i, j) = (1 - fx) * (1 - fy) * img.at(c, y0, x0) +
                                  fx * (1 - fy) * img.at(c, y0, x1) +
                                  (1 - fx) * fy * img.at(c, y1, x0) + fx * fy * img.at(c, y1, x1);
            }
        }
    return out;
}

Tensor lambertian_compose(const Tensor& albedo_warped, const Tensor& shading) {
    check(albedo_warped.shape() == shading.shape(), "lambertian_compose: shape mismatch");
    return clamp(mul(albedo_warped, shading), 0.0, 1.0);
}

Raster shade_uv_texture(const Raster& albedo, const Raster& uv_normals, const Raster& light_coeffs) {
    check(light_coeffs.c == 1 && light_coeffs.h == 3 && light_coeffs.w == kShCount,
          "shade_uv_texture: coeffs must be [1,3,9]");
    Raster out(3, albedo.h, albedo.w);
    for (int i = 0; i < albedo.h; ++i)
        for (int j = 0; j < albedo.w; ++j) {
            auto b = sh_basis(uv_normals.at(0, i, j), uv_normals.at(1, i, j),
                              uv_normals.at(2, i, j));
            for (int c = 0; c < 3; ++c) {
                real s = 0.0;
                for (int k = 0; k < kShCount; ++k) s += light_coeffs.at(0, c, k) * b[k];
                s = std::max(kShadeFloor, s);
                out.at(c, i, j) = std::min(1.0, std::max(0.0, albedo.at(c, i, j) * s));
            }
        }
    return out;
}

Raster shade_raster(const WarpField& warp, const Raster& coeffs) {
    NoGradGuard ng;
    check(coeffs.c == 1 && coeffs.h == 3 && coeffs.w == kShCount,
          "shade_raster: coeffs must be [1,3,9]");
    Tensor ct = Tensor::from({3, kShCount}, coeffs.v);
    return Raster::from_tensor(shade(warp, ct));
}

Raster warp_raster(const Raster& tex, const WarpField& warp) {
    NoGradGuard ng;
    return Raster::from_tensor(warp_uv_to_image(tex.tensor(), warp));
}

Raster render_image(const Raster& albedo_uv, const WarpField& warp, const Raster& coeffs) {
    NoGradGuard ng;
    Tensor a = warp_uv_to_image(albedo_uv.tensor(), warp);
    Tensor s = shade(warp, Tensor::from({3, kShCount}, coeffs.v));
    return Raster::from_tensor(lambertian_compose(a, s));
}

} // namespace delight
