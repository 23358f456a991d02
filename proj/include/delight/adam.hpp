// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "delight/tensor.hpp"

namespace delight {

struct AdamConfig {
    real lr = 1e-5;
    real beta1 = 0.9;
    real beta2 = 0.999;
    real eps = 1e-8;
};

// Adam over an explicit parameter list. Moment buffers are indexed by the
// parameter order, which checkpointing keeps stable (parameters are collected
// in a fixed registration order).
class Adam {
public:
    Adam() = default;
    Adam(std::vector<Tensor> params, AdamConfig cfg) : cfg_(cfg), params_(std::move(params)) {
        for (const auto& p : params_) {
            m_.emplace_back(p.size(), 0.0);
            v_.emplace_back(p.size(), 0.0);
        }
    }

    void step() {
        ++t_;
        real bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<real>(t_));
        real bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<real>(t_));
        for (std::size_t k = 0; k < params_.size(); ++k) {
            auto g = params_[k].grad();
            auto& val = params_[k].data();
            auto& m = m_[k];
            auto& v = v_[k];
            for (std::size_t i = 0; i < val.size(); ++i) {
                m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
                v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
                real mh = m[i] / bc1;
                real vh = v[i] / bc2;
                val[i] -= cfg_.lr * mh / (std::sqrt(vh) + cfg_.eps);
            }
        }
    }

    std::int64_t steps_taken() const { return t_; }
    const AdamConfig& config() const { return cfg_; }
    void set_lr(real lr) { cfg_.lr = lr; }

    // state access for checkpointing
    std::vector<std::vector<real>>& moment1() { return m_; }
    std::vector<std::vector<real>>& moment2() { return v_; }
    void set_steps_taken(std::int64_t t) { t_ = t; }
    const std::vector<Tensor>& params() const { return params_; }

private:
    AdamConfig cfg_;
    std::vector<Tensor> params_;
    std::vector<std::vector<real>> m_, v_;
    std::int64_t t_ = 0;
};

} // namespace delight
