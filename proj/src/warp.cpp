// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#include "delight/warp.hpp"

#include <cmath>

#include "delight/arrayio.hpp"
#include "delight/sh.hpp"

namespace delight {

namespace {

// Head proxy: ellipsoid semi-axes in view units (x right, y up, z toward
// camera) and the orthographic framing scale.
constexpr real kAxisX = 0.78;
constexpr real kAxisY = 1.0;
constexpr real kAxisZ = 0.85;
constexpr real kFrame = 1.08;

// Longitude/latitude half-ranges mapped onto the UV unit square. Wide enough
// that every view in the bank lands inside [0,1]^2.
constexpr real kLonMax = 2.1; // radians
constexpr real kLatMax = 1.9;

struct Rot {
    real m[3][3];
};

Rot rotation(real yaw_deg, real pitch_deg) {
    real ay = yaw_deg * M_PI / 180.0, ap = pitch_deg * M_PI / 180.0;
    real cy = std::cos(ay), sy = std::sin(ay), cp = std::cos(ap), sp = std::sin(ap);
    // R = R_yaw(y axis) * R_pitch(x axis); q_view = R * q_canonical
    Rot r;
    r.m[0][0] = cy;
    r.m[0][1] = sy * sp;
    r.m[0][2] = sy * cp;
    r.m[1][0] = 0;
    r.m[1][1] = cp;
    r.m[1][2] = -sp;
    r.m[2][0] = -sy;
    r.m[2][1] = cy * sp;
    r.m[2][2] = cy * cp;
    return r;
}

void mat_vec(const Rot& r, const real a[3], real out[3]) {
    for (int i = 0; i < 3; ++i)
        out[i] = r.m[i][0] * a[0] + r.m[i][1] * a[1] + r.m[i][2] * a[2];
}

void mat_tvec(const Rot& r, const real a[3], real out[3]) {
    for (int i = 0; i < 3; ++i)
        out[i] = r.m[0][i] * a[0] + r.m[1][i] * a[1] + r.m[2][i] * a[2];
}

} // namespace

void WarpField::compute_basis() {
    basis.assign(static_cast<std::size_t>(kShCount) * h * w, 0.0);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            std::size_t p = static_cast<std::size_t>(i) * w + j;
            if (mask[p] < 0.5) continue;
            auto b = sh_basis(normals[p * 3], normals[p * 3 + 1], normals[p * 3 + 2]);
            for (int k = 0; k < kShCount; ++k)
                basis[static_cast<std::size_t>(k) * h * w + p] = b[k];
        }
}

std::vector<ViewSpec> default_view_bank() {
    return {
        {"frontal", 0.0, 0.0},  {"yaw_neg", -24.0, 0.0}, {"yaw_pos", 24.0, 0.0},
        {"pitch_neg", 0.0, -16.0}, {"pitch_pos", 0.0, 16.0},
    };
}

WarpField build_warp(const ViewSpec& view, int h, int w) {
    WarpField wf;
    wf.h = h;
    wf.w = w;
    wf.uv.assign(static_cast<std::size_t>(h) * w * 2, 0.0);
    wf.normals.assign(static_cast<std::size_t>(h) * w * 3, 0.0);
    wf.mask.assign(static_cast<std::size_t>(h) * w, 0.0);

    Rot r = rotation(view.yaw_deg, view.pitch_deg);
    const real sa[3] = {kAxisX, kAxisY, kAxisZ};

    for (int i = 0; i < h; ++i) {
        real y = (1.0 - 2.0 * (i + 0.5) / h) * kFrame;
        for (int j = 0; j < w; ++j) {
            real x = (2.0 * (j + 0.5) / w - 1.0) * kFrame;
            // intersect the view ray (x, y, z) with the rotated ellipsoid:
            // sum_i ((R^T p)_i / s_i)^2 = 1, quadratic in z
            real qa = 0, qb = 0, qc = 0;
            for (int k = 0; k < 3; ++k) {
                real rz = r.m[2][k]; // column of R^T times z... rows of R^T are columns of R
                real u = r.m[0][k] * x + r.m[1][k] * y;
                real inv = 1.0 / sa[k];
                qa += (rz * inv) * (rz * inv);
                qb += 2.0 * rz * u * inv * inv;
                qc += (u * inv) * (u * inv);
            }
            real disc = qb * qb - 4.0 * qa * (qc - 1.0);
            std::size_t p = static_cast<std::size_t>(i) * w + j;
            if (disc <= 0.0) continue;
            real z = (-qb + std::sqrt(disc)) / (2.0 * qa);

            real pv[3] = {x, y, z};
            real q[3];
            mat_tvec(r, pv, q); // canonical coordinates
            // canonical surface normal, rotated into view space
            real ncan[3] = {q[0] / (sa[0] * sa[0]), q[1] / (sa[1] * sa[1]),
                            q[2] / (sa[2] * sa[2])};
            real nv[3];
            mat_vec(r, ncan, nv);
            real len = std::sqrt(nv[0] * nv[0] + nv[1] * nv[1] + nv[2] * nv[2]);
            nv[0] /= len;
            nv[1] /= len;
            nv[2] /= len;
            if (nv[2] <= 0.02) continue; // grazing/back-facing
            real lon = std::atan2(q[0] / sa[0], q[2] / sa[2]);
            real lat = std::asin(std::min(1.0, std::max(-1.0, q[1] / sa[1])));
            real u = 0.5 + lon / (2.0 * kLonMax);
            real v = 0.5 - lat / (2.0 * kLatMax);
            if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0) continue;

            wf.mask[p] = 1.0;
            wf.uv[p * 2] = u;
            wf.uv[p * 2 + 1] = v;
            wf.normals[p * 3] = nv[0];
            wf.normals[p * 3 + 1] = nv[1];
            wf.normals[p * 3 + 2] = nv[2];
        }
    }
    wf.compute_basis();
    return wf;
}

InverseWarp build_inverse_warp(const ViewSpec& view, int tex_h, int tex_w, int img_h, int img_w) {
    InverseWarp iw;
    iw.h = tex_h;
    iw.w = tex_w;
    iw.xy.assign(static_cast<std::size_t>(tex_h) * tex_w * 2, 0.0);
    iw.vis.assign(static_cast<std::size_t>(tex_h) * tex_w, 0.0);

    Rot r = rotation(view.yaw_deg, view.pitch_deg);
    const real sa[3] = {kAxisX, kAxisY, kAxisZ};

    for (int ti = 0; ti < tex_h; ++ti) {
        real v = (ti + 0.5) / tex_h;
        real lat = -(v - 0.5) * 2.0 * kLatMax;
        if (std::abs(lat) >= M_PI / 2) continue;
        for (int tj = 0; tj < tex_w; ++tj) {
            real u = (tj + 0.5) / tex_w;
            real lon = (u - 0.5) * 2.0 * kLonMax;
            if (std::abs(lon) >= M_PI) continue;
            real q[3] = {sa[0] * std::cos(lat) * std::sin(lon), sa[1] * std::sin(lat),
                         sa[2] * std::cos(lat) * std::cos(lon)};
            real pv[3];
            mat_vec(r, q, pv);
            real ncan[3] = {q[0] / (sa[0] * sa[0]), q[1] / (sa[1] * sa[1]),
                            q[2] / (sa[2] * sa[2])};
            real nv[3];
            mat_vec(r, ncan, nv);
            real len = std::sqrt(nv[0] * nv[0] + nv[1] * nv[1] + nv[2] * nv[2]);
            if (nv[2] / len <= 0.05) continue;
            real px = (pv[0] / kFrame + 1.0) * 0.5 * img_w - 0.5;
            real py = (1.0 - pv[1] / kFrame) * 0.5 * img_h - 0.5;
            if (px < 0.0 || px > img_w - 1.0 || py < 0.0 || py > img_h - 1.0) continue;
            std::size_t p = static_cast<std::size_t>(ti) * tex_w + tj;
            iw.vis[p] = 1.0;
            iw.xy[p * 2] = px;
            iw.xy[p * 2 + 1] = py;
        }
    }
    return iw;
}

Raster uv_normal_map(int tex_h, int tex_w) {
    Raster nm(3, tex_h, tex_w);
    const real sa[3] = {kAxisX, kAxisY, kAxisZ};
    for (int ti = 0; ti < tex_h; ++ti) {
        real v = (ti + 0.5) / tex_h;
        real lat = -(v - 0.5) * 2.0 * kLatMax;
        lat = std::min(M_PI / 2 - 1e-3, std::max(-M_PI / 2 + 1e-3, lat));
        for (int tj = 0; tj < tex_w; ++tj) {
            real u = (tj + 0.5) / tex_w;
            real lon = (u - 0.5) * 2.0 * kLonMax;
            lon = std::min(M_PI - 1e-3, std::max(-M_PI + 1e-3, lon));
            real q[3] = {sa[0] * std::cos(lat) * std::sin(lon), sa[1] * std::sin(lat),
                         sa[2] * std::cos(lat) * std::cos(lon)};
            real n[3] = {q[0] / (sa[0] * sa[0]), q[1] / (sa[1] * sa[1]), q[2] / (sa[2] * sa[2])};
            real len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
            nm.at(0, ti, tj) = n[0] / len;
            nm.at(1, ti, tj) = n[1] / len;
            nm.at(2, ti, tj) = n[2] / len;
        }
    }
    return nm;
}

Raster uv_skin_mask(int tex_h, int tex_w) {
    Raster m(1, tex_h, tex_w);
    for (int i = 0; i < tex_h; ++i)
        for (int j = 0; j < tex_w; ++j) {
            real du = ((j + 0.5) / tex_w - 0.5) / 0.47;
            real dv = ((i + 0.5) / tex_h - 0.5) / 0.47;
            m.at(0, i, j) = (du * du + dv * dv <= 1.0) ? 1.0 : 0.0;
        }
    return m;
}

void save_warp(const std::string& dir, const std::string& stem, const WarpField& wf) {
    write_array(dir + "/" + stem + ".uv.arr", {wf.h, wf.w, 2}, wf.uv);
    write_array(dir + "/" + stem + ".normals.arr", {wf.h, wf.w, 3}, wf.normals);
    write_array(dir + "/" + stem + ".mask.arr", {wf.h, wf.w}, wf.mask);
}

WarpField load_warp(const std::string& dir, const std::string& stem) {
    WarpField wf;
    ArrayFile uv = read_array(dir + "/" + stem + ".uv.arr");
    ArrayFile nm = read_array(dir + "/" + stem + ".normals.arr");
    ArrayFile mk = read_array(dir + "/" + stem + ".mask.arr");
    check(uv.shape.size() == 3 && uv.shape[2] == 2, "load_warp: bad uv shape");
    wf.h = uv.shape[0];
    wf.w = uv.shape[1];
    wf.uv = std::move(uv.data);
    wf.normals = std::move(nm.data);
    wf.mask = std::move(mk.data);
    wf.compute_basis();
    return wf;
}

} // namespace delight
