// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "delight/rng.hpp"
#include "delight/tensor.hpp"

namespace delight {

using NamedParams = std::vector<std::pair<std::string, Tensor>>;

inline Tensor he_uniform(const Shape& s, int fan_in, Rng& rng) {
    real bound = std::sqrt(6.0 / static_cast<real>(fan_in));
    std::vector<real> v(numel(s));
    for (auto& x : v) x = rng.uniform(-bound, bound);
    Tensor t = Tensor::from(s, std::move(v));
    t.set_requires_grad(true);
    return t;
}

inline Tensor zero_param(const Shape& s) {
    Tensor t = Tensor::zeros(s);
    t.set_requires_grad(true);
    return t;
}

struct Conv2d {
    Tensor w, b;
    int stride = 1, pad = 1;

    Conv2d() = default;
    Conv2d(int cin, int cout, int k, int stride_, int pad_, Rng& rng)
        : w(he_uniform({cout, cin, k, k}, cin * k * k, rng)), b(zero_param({cout})),
          stride(stride_), pad(pad_) {}

    Tensor forward(const Tensor& x) const { return conv2d(x, w, b, stride, pad); }

    void collect(const std::string& prefix, NamedParams& out) const {
        out.emplace_back(prefix + ".w", w);
        out.emplace_back(prefix + ".b", b);
    }
};

struct Linear {
    Tensor w, b;

    Linear() = default;
    Linear(int din, int dout, Rng& rng)
        : w(he_uniform({dout, din}, din, rng)), b(zero_param({dout})) {}

    // x: [m, din] -> [m, dout]
    Tensor forward(const Tensor& x) const { return linear_rows(x, w, b); }
    // 1-D convenience
    Tensor forward_vec(const Tensor& x) const {
        return reshape(linear_rows(reshape(x, {1, x.shape()[0]}), w, b), {w.shape()[0]});
    }

    void collect(const std::string& prefix, NamedParams& out) const {
        out.emplace_back(prefix + ".w", w);
        out.emplace_back(prefix + ".b", b);
    }
};

inline void set_params_trainable(const NamedParams& ps, bool trainable) {
    for (auto& [name, t] : ps) const_cast<Tensor&>(t).set_requires_grad(trainable);
}

inline std::vector<Tensor> param_tensors(const NamedParams& ps) {
    std::vector<Tensor> out;
    out.reserve(ps.size());
    for (const auto& [name, t] : ps) out.push_back(t);
    return out;
}

// ---------------------------------------------------------------------------
// Networks. All operate on single samples ([C,H,W]); training loops iterate
// over the batch. Spatial contract: image_size -> image_size/8 latent grid.
// ---------------------------------------------------------------------------

constexpr real kLeakySlope = 0.2;

// Image/texture encoder: [3,S,S] -> [d, S/8, S/8]
struct Encoder {
    Conv2d stem, down1, down2, down3, head;

    Encoder() = default;
    Encoder(int d, Rng& rng)
        : stem(3, 32, 3, 1, 1, rng), down1(32, 48, 3, 2, 1, rng), down2(48, 64, 3, 2, 1, rng),
          down3(64, 64, 3, 2, 1, rng), head(64, d, 3, 1, 1, rng) {}

    Tensor forward(const Tensor& x) const {
        Tensor h = leaky_relu(stem.forward(x), kLeakySlope);
        h = leaky_relu(down1.forward(h), kLeakySlope);
        h = leaky_relu(down2.forward(h), kLeakySlope);
        h = leaky_relu(down3.forward(h), kLeakySlope);
        return head.forward(h);
    }

    void collect(const std::string& prefix, NamedParams& out) const {
        stem.collect(prefix + ".stem", out);
        down1.collect(prefix + ".down1", out);
        down2.collect(prefix + ".down2", out);
        down3.collect(prefix + ".down3", out);
        head.collect(prefix + ".head", out);
    }
};

// Decoder: [d, s, s] -> [3, 8s, 8s], output in (0,1) via sigmoid
struct Decoder {
    Conv2d stem, up1, up2, up3, head;

    Decoder() = default;
    Decoder(int d, Rng& rng)
        : stem(d, 64, 3, 1, 1, rng), up1(64, 64, 3, 1, 1, rng), up2(64, 48, 3, 1, 1, rng),
          up3(48, 32, 3, 1, 1, rng), head(32, 3, 3, 1, 1, rng) {}

    Tensor forward(const Tensor& z) const {
        Tensor h = leaky_relu(stem.forward(z), kLeakySlope);
        h = leaky_relu(up1.forward(upsample2x(h)), kLeakySlope);
        h = leaky_relu(up2.forward(upsample2x(h)), kLeakySlope);
        h = leaky_relu(up3.forward(upsample2x(h)), kLeakySlope);
        return sigmoid(head.forward(h));
    }

    void collect(const std::string& prefix, NamedParams& out) const {
        stem.collect(prefix + ".stem", out);
        up1.collect(prefix + ".up1", out);
        up2.collect(prefix + ".up2", out);
        up3.collect(prefix + ".up3", out);
        head.collect(prefix + ".head", out);
    }
};

// Patch discriminator on RGB rasters: [3,S,S] -> logit map [1,S/4,S/4]
struct PatchDiscriminator {
    Conv2d c1, c2, c3, head;

    PatchDiscriminator() = default;
    explicit PatchDiscriminator(Rng& rng)
        : c1(3, 24, 3, 2, 1, rng), c2(24, 32, 3, 2, 1, rng), c3(32, 48, 3, 1, 1, rng),
          head(48, 1, 3, 1, 1, rng) {}

    Tensor forward(const Tensor& x) const {
        Tensor h = leaky_relu(c1.forward(x), kLeakySlope);
        h = leaky_relu(c2.forward(h), kLeakySlope);
        h = leaky_relu(c3.forward(h), kLeakySlope);
        return head.forward(h);
    }

    void collect(const std::string& prefix, NamedParams& out) const {
        c1.collect(prefix + ".c1", out);
        c2.collect(prefix + ".c2", out);
        c3.collect(prefix + ".c3", out);
        head.collect(prefix + ".head", out);
    }
};

// Discriminator on latent grids: [d,s,s] -> logit map [1,s,s]
struct LatentDiscriminator {
    Conv2d c1, c2, head;

    LatentDiscriminator() = default;
    LatentDiscriminator(int d, Rng& rng)
        : c1(d, 48, 3, 1, 1, rng), c2(48, 32, 3, 1, 1, rng), head(32, 1, 3, 1, 1, rng) {}

    Tensor forward(const Tensor& z) const {
        Tensor h = leaky_relu(c1.forward(z), kLeakySlope);
        h = leaky_relu(c2.forward(h), kLeakySlope);
        return head.forward(h);
    }

    void collect(const std::string& prefix, NamedParams& out) const {
        c1.collect(prefix + ".c1", out);
        c2.collect(prefix + ".c2", out);
        head.collect(prefix + ".head", out);
    }
};

} // namespace delight
