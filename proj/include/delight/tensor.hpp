// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "delight/common.hpp"

namespace delight {

// Reverse-mode autodiff over dense double tensors. Graphs are built
// define-by-run; backward() walks the DAG once in reverse topological order.
// Desk-scale by design: single-threaded, row-major, no views.

struct TensorNode;
using NodeRef = std::shared_ptr<TensorNode>;

struct TensorNode {
    Shape shape;
    std::vector<real> val;
    std::vector<real> grad;          // valid only when grad_epoch == current epoch
    std::uint64_t grad_epoch = 0;
    bool requires_grad = false;
    std::vector<NodeRef> parents;
    // Propagates this node's grad into parents' grads.
    std::function<void(TensorNode&)> backward_fn;

    std::size_t size() const { return val.size(); }
};

class Tensor {
public:
    Tensor() = default;
    explicit Tensor(NodeRef n) : node_(std::move(n)) {}

    static Tensor zeros(const Shape& s);
    static Tensor full(const Shape& s, real v);
    static Tensor from(const Shape& s, std::vector<real> data);
    static Tensor scalar(real v) { return full({1}, v); }

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    std::size_t size() const { return node_->val.size(); }
    const std::vector<real>& data() const { return node_->val; }
    std::vector<real>& data() { return node_->val; }
    real item() const;
    real at(std::size_t i) const { return node_->val[i]; }

    bool requires_grad() const { return node_->requires_grad; }
    Tensor& set_requires_grad(bool rg) {
        node_->requires_grad = rg;
        return *this;
    }
    // Gradient accumulated by the most recent backward(); zeros if the tensor
    // did not participate.
    std::vector<real> grad() const;

    NodeRef node() const { return node_; }

private:
    NodeRef node_;
};

// --- grad mode -------------------------------------------------------------

bool grad_enabled();
struct NoGradGuard {
    NoGradGuard();
    ~NoGradGuard();
    bool prev;
};

// Runs reverse-mode accumulation from a scalar loss.
void backward(const Tensor& loss);

// --- op construction helper (used by renderer et al.) -----------------------

Tensor make_op(const Shape& out_shape, std::vector<real> out_val,
               std::vector<Tensor> parents,
               std::function<void(TensorNode&)> backward_fn);

// --- elementwise -------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, real s);
Tensor add_scalar(const Tensor& a, real s);
Tensor leaky_relu(const Tensor& x, real slope);
Tensor sigmoid(const Tensor& x);
Tensor tanh_t(const Tensor& x);
Tensor sqrt_t(const Tensor& x, real eps = 0.0);
Tensor softplus(const Tensor& x);
// clamp to [lo,hi]; gradient passes inside the interval, zero outside
Tensor clamp(const Tensor& x, real lo, real hi);
Tensor detach(const Tensor& x);

// --- reductions / losses -----------------------------------------------------

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor mse(const Tensor& a, const Tensor& b);      // mean squared error
Tensor l1(const Tensor& a, const Tensor& b);       // mean absolute error
Tensor dot(const Tensor& a, const Tensor& b);      // scalar
// cross entropy of a single logit vector against an integer label
Tensor softmax_xent(const Tensor& logits, int label);

// --- linear algebra ----------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);    // [m,k]x[k,n]
Tensor transpose2(const Tensor& a);                 // [m,n] -> [n,m]
// X [m,din] * W^T [din,dout] + b  -> [m,dout]
Tensor linear_rows(const Tensor& x, const Tensor& w, const Tensor& b);
Tensor softmax_rows(const Tensor& x);               // softmax along dim 1 of [r,c]
Tensor l2_normalize(const Tensor& x, real eps = 1e-12);

// --- shape -------------------------------------------------------------------

Tensor reshape(const Tensor& x, const Shape& s);
Tensor concat_rows(const std::vector<Tensor>& xs);  // [ri,c] -> [sum ri, c]
// rows of table selected by idx; backward scatter-adds into table
Tensor gather_rows(const Tensor& table, const std::vector<int>& idx);

// --- conv nets ---------------------------------------------------------------

// x [Ci,H,W], w [Co,Ci,kh,kw], b [Co]
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad);
Tensor upsample2x(const Tensor& x);                 // nearest neighbor
Tensor global_avg_pool(const Tensor& x);            // [C,H,W] -> [C]

} // namespace delight
