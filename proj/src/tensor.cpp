// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#include "delight/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace delight {

namespace {

bool g_grad_enabled = true;
std::uint64_t g_backward_epoch = 0;

using Mat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<Mat>;
using CMatMap = Eigen::Map<const Mat>;

void ensure_grad(TensorNode& n) {
    if (n.grad_epoch != g_backward_epoch) {
        n.grad.assign(n.val.size(), 0.0);
        n.grad_epoch = g_backward_epoch;
    }
}

NodeRef new_node(const Shape& s, std::vector<real> v) {
    auto n = std::make_shared<TensorNode>();
    n->shape = s;
    n->val = std::move(v);
    return n;
}

bool track(const std::vector<Tensor>& parents) {
    if (!g_grad_enabled) return false;
    for (const auto& p : parents)
        if (p.node()->requires_grad) return true;
    return false;
}

void attach(const Tensor& out, std::vector<Tensor> parents,
            std::function<void(TensorNode&)> fn) {
    if (!track(parents)) return;
    auto n = out.node();
    n->requires_grad = true;
    n->parents.reserve(parents.size());
    for (auto& p : parents) n->parents.push_back(p.node());
    n->backward_fn = std::move(fn);
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    check(a.shape() == b.shape(), std::string(what) + ": shape mismatch " +
                                      shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

} // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev; }

Tensor Tensor::zeros(const Shape& s) {
    return Tensor(new_node(s, std::vector<real>(numel(s), 0.0)));
}

Tensor Tensor::full(const Shape& s, real v) {
    return Tensor(new_node(s, std::vector<real>(numel(s), v)));
}

Tensor Tensor::from(const Shape& s, std::vector<real> data) {
    check(numel(s) == data.size(), "Tensor::from: data size does not match shape");
    return Tensor(new_node(s, std::move(data)));
}

real Tensor::item() const {
    check(node_->val.size() == 1, "item(): tensor is not a scalar");
    return node_->val[0];
}

std::vector<real> Tensor::grad() const {
    if (node_->grad_epoch == g_backward_epoch && !node_->grad.empty()) return node_->grad;
    return std::vector<real>(node_->val.size(), 0.0);
}

void backward(const Tensor& loss) {
    check(loss.size() == 1, "backward(): loss must be scalar");
    ++g_backward_epoch;

    // reverse topological order via iterative post-order DFS
    std::vector<TensorNode*> order;
    std::unordered_set<TensorNode*> seen;
    std::vector<std::pair<TensorNode*, std::size_t>> stack;
    stack.push_back({loss.node().get(), 0});
    seen.insert(loss.node().get());
    while (!stack.empty()) {
        auto& [n, i] = stack.back();
        if (i < n->parents.size()) {
            TensorNode* p = n->parents[i++].get();
            if (p->requires_grad && !seen.count(p)) {
                seen.insert(p);
                stack.push_back({p, 0});
            }
        } else {
            order.push_back(n);
            stack.pop_back();
        }
    }

    ensure_grad(*loss.node());
    loss.node()->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        TensorNode* n = *it;
        if (n->backward_fn) n->backward_fn(*n);
    }
}

Tensor make_op(const Shape& out_shape, std::vector<real> out_val,
               std::vector<Tensor> parents,
               std::function<void(TensorNode&)> backward_fn) {
    Tensor out(new_node(out_shape, std::move(out_val)));
    attach(out, std::move(parents), std::move(backward_fn));
    return out;
}

// --- elementwise -------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    std::vector<real> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.at(i) + b.at(i);
    auto pa = a.node(), pb = b.node();
    return make_op(a.shape(), std::move(v), {a, b}, [pa, pb](TensorNode& o) {
        if (pa->requires_grad) {
            ensure_grad(*pa);
            for (std::size_t i = 0; i < o.grad.size(); ++i) pa->grad[i] += o.grad[i];
        }
        if (pb->requires_grad) {
            ensure_grad(*pb);
            for (std::size_t i = 0; i < o.grad.size(); ++i) pb->grad[i] += o.grad[i];
        }
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    std::vector<real> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.at(i) - b.at(i);
    auto pa = a.node(), pb = b.node();
    return make_op(a.shape(), std::move(v), {a, b}, [pa, pb](TensorNode& o) {
        if (pa->requires_grad) {
            ensure_grad(*pa);
            for (std::size_t i = 0; i < o.grad.size(); ++i) pa->grad[i] += o.grad[i];
        }
        if (pb->requires_grad) {
            ensure_grad(*pb);
            for (std::size_t i = 0; i < o.grad.size(); ++i) pb->grad[i] -= o.grad[i];
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mul");
    std::vector<real> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.at(i) * b.at(i);
    auto pa = a.node(), pb = b.node();
    return make_op(a.shape(), std::move(v), {a, b}, [pa, pb](TensorNode& o) {
        if (pa->requires_grad) {
            ensure_grad(*pa);
            for (std::size_t i = 0; i < o.grad.size(); ++i) pa->grad[i] += o.grad[i] * pb->val[i];
        }
        if (pb->requires_grad) {
            ensure_grad(*pb);
            for (std::size_t i = 0; i < o.grad.size(); ++i) pb->grad[i] += o.grad[i] * pa->val[i];
        }
    });
}

Tensor scale(const Tensor& a, real s) {
    std::vector<real> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.at(i) * s;
    auto pa = a.node();
    return make_op(a.shape(), std::move(v), {a}, [pa, s](TensorNode& o) {
        if (!pa->requires_grad) return;
        ensure_grad(*pa);
        for (std::size_t i = 0; i < o.grad.size(); ++i) pa->grad[i] += o.grad[i] * s;
    });
}

Tensor add_scalar(const Tensor& a, real s) {
    std::vector<real> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.at(i) + s;
    auto pa = a.node();
    return make_op(a.shape(), std::move(v), {a}, [pa](TensorNode& o) {
        if (!pa->requires_grad) return;
        ensure_grad(*pa);
        for (std::size_t i = 0; i < o.grad.size(); ++i) pa->grad[i] += o.grad[i];
    });
}

Tensor leaky_relu(const Tensor& x, real slope) {
    std::vector<real> v(x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = x.at(i) > 0 ? x.at(i) : slope * x.at(i);
    auto px = x.node();
    return make_op(x.shape(), std::move(v), {x}, [px, slope](TensorNode& o) {
        if (!px->requires_grad) return;
        ensure_grad(*px);
        for (std::size_t i = 0; i < o.grad.size(); ++i)
            px->grad[i] += o.grad[i] * (px->val[i] > 0 ? 1.0 : slope);
    });
}

Tensor sigmoid(const Tensor& x) {
    std::vector<real> v(x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + std::exp(-x.at(i)));
    auto px = x.node();
    Tensor out(new_node(x.shape(), std::move(v)));
    attach(out, {x}, [px](TensorNode& o) {
        if (!px->requires_grad) return;
        ensure_grad(*px);
        for (std::size_t i = 0; i < o.grad.size(); ++i) {
            real s = o.val[i];
            px->grad[i] += o.grad[i] * s * (1.0 - s);
        }
    });
    return out;
}

Tensor tanh_t(const Tensor& x) {
    std::vector<real> v(x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::tanh(x.at(i));
    auto px = x.node();
    Tensor out(new_node(x.shape(), std::move(v)));
    attach(out, {x}, [px](TensorNode& o) {
        if (!px->requires_grad) return;
        ensure_grad(*px);
        for (std::size_t i = 0; i < o.grad.size(); ++i) {
            real t = o.val[i];
            px->grad[i] += o.grad[i] * (1.0 - t * t);
        }
    });
    return out;
}

Tensor sqrt_t(const Tensor& x, real eps) {
    std::vector<real> v(x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sqrt(x.at(i) + eps);
    auto px = x.node();
    Tensor out(new_node(x.shape(), std::move(v)));
    attach(out, {x}, [px](TensorNode& o) {
        if (!px->requires_grad) return;
        ensure_grad(*px);
        for (std::size_t i = 0; i < o.grad.size(); ++i)
            px->grad[i] += o.grad[i] * 0.5 / o.val[i];
    });
    return out;
}

Tensor softplus(const Tensor& x) {
    std::vector<real> v(x.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        real t = x.at(i);
        v[i] = std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
    }
    auto px = x.node();
    return make_op(x.shape(), std::move(v), {x}, [px](TensorNode& o) {
        if (!px->requires_grad) return;
        ensure_grad(*px);
        for (std::size_t i = 0; i < o.grad.size(); ++i)
            px->grad[i] += o.grad[i] / (1.0 + std::exp(-px->val[i]));
    });
}

Tensor clamp(const Tensor& x, real lo, real hi) {
    std::vector<real> v(x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::min(hi, std::max(lo, x.at(i)));
    auto px = x.node();
    return make_op(x.shape(), std::move(v), {x}, [px, lo, hi](TensorNode& o) {
        if (!px->requires_grad) return;
        ensure_grad(*px);
        for (std::size_t i = 0; i < o.grad.size(); ++i) {
            real t = px->val[i];
            if (t >= lo && t <= hi) px->grad[i] += o.grad[i];
        }
    });
}

Tensor detach(const Tensor& x) {
    return Tensor(new_node(x.shape(), x.data()));
}

// --- reductions / losses -----------------------------------------------------

Tensor sum(const Tensor& x) {
    real s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x.at(i);
    auto px = x.node();
    return make_op({1}, {s}, {x}, [px](TensorNode& o) {
        if (!px->requires_grad) return;
        ensure_grad(*px);
        for (std::size_t i = 0; i < px->grad.size(); ++i) px->grad[i] += o.grad[0];
    });
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<real>(x.size())); }

Tensor mse(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mse");
    real s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        real d = a.at(i) - b.at(i);
        s += d * d;
    }
    real inv_n = 1.0 / static_cast<real>(a.size());
    auto pa = a.node(), pb = b.node();
    return make_op({1}, {s * inv_n}, {a, b}, [pa, pb, inv_n](TensorNode& o) {
        real g = o.grad[0] * 2.0 * inv_n;
        if (pa->requires_grad) {
            ensure_grad(*pa);
            for (std::size_t i = 0; i < pa->grad.size(); ++i)
                pa->grad[i] += g * (pa->val[i] - pb->val[i]);
        }
        if (pb->requires_grad) {
            ensure_grad(*pb);
            for (std::size_t i = 0; i < pb->grad.size(); ++i)
                pb->grad[i] += g * (pb->val[i] - pa->val[i]);
        }
    });
}

Tensor l1(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "l1");
    real s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.at(i) - b.at(i));
    real inv_n = 1.0 / static_cast<real>(a.size());
    auto pa = a.node(), pb = b.node();
    return make_op({1}, {s * inv_n}, {a, b}, [pa, pb, inv_n](TensorNode& o) {
        real g = o.grad[0] * inv_n;
        for (std::size_t i = 0; i < pa->val.size(); ++i) {
            real d = pa->val[i] - pb->val[i];
            real sg = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
            if (pa->requires_grad) {
                ensure_grad(*pa);
                pa->grad[i] += g * sg;
            }
            if (pb->requires_grad) {
                ensure_grad(*pb);
                pb->grad[i] -= g * sg;
            }
        }
    });
}

Tensor dot(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "dot");
    real s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.at(i) * b.at(i);
    auto pa = a.node(), pb = b.node();
    return make_op({1}, {s}, {a, b}, [pa, pb](TensorNode& o) {
        real g = o.grad[0];
        if (pa->requires_grad) {
            ensure_grad(*pa);
            for (std::size_t i = 0; i < pa->grad.size(); ++i) pa->grad[i] += g * pb->val[i];
        }
        if (pb->requires_grad) {
            ensure_grad(*pb);
            for (std::size_t i = 0; i < pb->grad.size(); ++i) pb->grad[i] += g * pa->val[i];
        }
    });
}

Tensor softmax_xent(const Tensor& logits, int label) {
    check(logits.shape().size() == 1, "softmax_xent: expect 1-D logits");
    check(label >= 0 && label < static_cast<int>(logits.size()), "softmax_xent: label out of range");
    real mx = logits.at(0);
    for (std::size_t i = 1; i < logits.size(); ++i) mx = std::max(mx, logits.at(i));
    real lse = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) lse += std::exp(logits.at(i) - mx);
    lse = mx + std::log(lse);
    real loss = lse - logits.at(static_cast<std::size_t>(label));
    auto pl = logits.node();
    return make_op({1}, {loss}, {logits}, [pl, label, lse](TensorNode& o) {
        if (!pl->requires_grad) return;
        ensure_grad(*pl);
        real g = o.grad[0];
        for (std::size_t i = 0; i < pl->grad.size(); ++i) {
            real p = std::exp(pl->val[i] - lse);
            pl->grad[i] += g * (p - (static_cast<int>(i) == label ? 1.0 : 0.0));
        }
    });
}

// --- linear algebra ----------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
    check(a.shape().size() == 2 && b.shape().size() == 2, "matmul: expect 2-D");
    int m = a.shape()[0], k = a.shape()[1], k2 = b.shape()[0], n = b.shape()[1];
    check(k == k2, "matmul: inner dimensions differ");
    std::vector<real> v(static_cast<std::size_t>(m) * n);
    {
        CMatMap A(a.data().data(), m, k), B(b.data().data(), k, n);
        MatMap C(v.data(), m, n);
        C.noalias() = A * B;
    }
    auto pa = a.node(), pb = b.node();
    return make_op({m, n}, std::move(v), {a, b}, [pa, pb, m, k, n](TensorNode& o) {
        CMatMap G(o.grad.data(), m, n);
        if (pa->requires_grad) {
            ensure_grad(*pa);
            CMatMap B(pb->val.data(), k, n);
            MatMap dA(pa->grad.data(), m, k);
            dA.noalias() += G * B.transpose();
        }
        if (pb->requires_grad) {
            ensure_grad(*pb);
            CMatMap A(pa->val.data(), m, k);
            MatMap dB(pb->grad.data(), k, n);
            dB.noalias() += A.transpose() * G;
        }
    });
}

Tensor transpose2(const Tensor& a) {
    check(a.shape().size() == 2, "transpose2: expect 2-D");
    int m = a.shape()[0], n = a.shape()[1];
    std::vector<real> v(a.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j) * m + i] = a.at(static_cast<std::size_t>(i) * n + j);
    auto pa = a.node();
    return make_op({n, m}, std::move(v), {a}, [pa, m, n](TensorNode& o) {
        if (!pa->requires_grad) return;
        ensure_grad(*pa);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                pa->grad[static_cast<std::size_t>(i) * n + j] += o.grad[static_cast<std::size_t>(j) * m + i];
    });
}

Tensor linear_rows(const Tensor& x, const Tensor& w, const Tensor& b) {
    check(x.shape().size() == 2 && w.shape().size() == 2, "linear_rows: expect 2-D");
    int m = x.shape()[0], din = x.shape()[1];
    int dout = w.shape()[0];
    check(w.shape()[1] == din, "linear_rows: weight shape mismatch");
    check(b.shape() == Shape{dout}, "linear_rows: bias shape mismatch");
    std::vector<real> v(static_cast<std::size_t>(m) * dout);
    {
        CMatMap X(x.data().data(), m, din), W(w.data().data(), dout, din);
        MatMap Y(v.data(), m, dout);
        Y.noalias() = X * W.transpose();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < dout; ++j) Y(i, j) += b.at(static_cast<std::size_t>(j));
    }
    auto px = x.node(), pw = w.node(), pb = b.node();
    return make_op({m, dout}, std::move(v), {x, w, b}, [px, pw, pb, m, din, dout](TensorNode& o) {
        CMatMap G(o.grad.data(), m, dout);
        if (px->requires_grad) {
            ensure_grad(*px);
            CMatMap W(pw->val.data(), dout, din);
            MatMap dX(px->grad.data(), m, din);
            dX.noalias() += G * W;
        }
        if (pw->requires_grad) {
            ensure_grad(*pw);
            CMatMap X(px->val.data(), m, din);
            MatMap dW(pw->grad.data(), dout, din);
            dW.noalias() += G.transpose() * X;
        }
        if (pb->requires_grad) {
            ensure_grad(*pb);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < dout; ++j) pb->grad[static_cast<std::size_t>(j)] += G(i, j);
        }
    });
}

Tensor softmax_rows(const Tensor& x) {
    check(x.shape().size() == 2, "softmax_rows: expect 2-D");
    int r = x.shape()[0], c = x.shape()[1];
    std::vector<real> v(x.size());
    for (int i = 0; i < r; ++i) {
        const real* row = x.data().data() + static_cast<std::size_t>(i) * c;
        real mx = row[0];
        for (int j = 1; j < c; ++j) mx = std::max(mx, row[j]);
        real s = 0.0;
        for (int j = 0; j < c; ++j) s += std::exp(row[j] - mx);
        real inv = 1.0 / s;
        for (int j = 0; j < c; ++j) v[static_cast<std::size_t>(i) * c + j] = std::exp(row[j] - mx) * inv;
    }
    auto px = x.node();
    Tensor out(new_node(x.shape(), std::move(v)));
    attach(out, {x}, [px, r, c](TensorNode& o) {
        if (!px->requires_grad) return;
        ensure_grad(*px);
        for (int i = 0; i < r; ++i) {
            const real* y = o.val.data() + static_cast<std::size_t>(i) * c;
            const real* g = o.grad.data() + static_cast<std::size_t>(i) * c;
            real dotv = 0.0;
            for (int j = 0; j < c; ++j) dotv += y[j] * g[j];
            real* dx = px->grad.data() + static_cast<std::size_t>(i) * c;
            for (int j = 0; j < c; ++j) dx[j] += y[j] * (g[j] - dotv);
        }
    });
    return out;
}

Tensor l2_normalize(const Tensor& x, real eps) {
    real nsq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) nsq += x.at(i) * x.at(i);
    real n = std::sqrt(nsq + eps);
    std::vector<real> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = x.at(i) / n;
    auto px = x.node();
    Tensor out(new_node(x.shape(), std::move(v)));
    attach(out, {x}, [px, n](TensorNode& o) {
        if (!px->requires_grad) return;
        ensure_grad(*px);
        real dotv = 0.0;
        for (std::size_t i = 0; i < o.grad.size(); ++i) dotv += o.grad[i] * o.val[i];
        for (std::size_t i = 0; i < o.grad.size(); ++i)
            px->grad[i] += (o.grad[i] - o.val[i] * dotv) / n;
    });
    return out;
}

// --- shape -------------------------------------------------------------------

Tensor reshape(const Tensor& x, const Shape& s) {
    check(numel(s) == x.size(), "reshape: element count mismatch");
    auto px = x.node();
    return make_op(s, x.data(), {x}, [px](TensorNode& o) {
        if (!px->requires_grad) return;
        ensure_grad(*px);
        for (std::size_t i = 0; i < o.grad.size(); ++i) px->grad[i] += o.grad[i];
    });
}

Tensor concat_rows(const std::vector<Tensor>& xs) {
    check(!xs.empty(), "concat_rows: empty input");
    int c = xs[0].shape()[1];
    int rows = 0;
    for (const auto& t : xs) {
        check(t.shape().size() == 2 && t.shape()[1] == c, "concat_rows: column mismatch");
        rows += t.shape()[0];
    }
    std::vector<real> v;
    v.reserve(static_cast<std::size_t>(rows) * c);
    for (const auto& t : xs) v.insert(v.end(), t.data().begin(), t.data().end());
    std::vector<NodeRef> ps;
    for (const auto& t : xs) ps.push_back(t.node());
    return make_op({rows, c}, std::move(v), xs, [ps](TensorNode& o) {
        std::size_t off = 0;
        for (const auto& p : ps) {
            if (p->requires_grad) {
                ensure_grad(*p);
                for (std::size_t i = 0; i < p->val.size(); ++i) p->grad[i] += o.grad[off + i];
            }
            off += p->val.size();
        }
    });
}

Tensor gather_rows(const Tensor& table, const std::vector<int>& idx) {
    check(table.shape().size() == 2, "gather_rows: table must be 2-D");
    int d = table.shape()[1];
    int n = table.shape()[0];
    std::vector<real> v(idx.size() * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        check(idx[i] >= 0 && idx[i] < n, "gather_rows: index out of range");
        const real* src = table.data().data() + static_cast<std::size_t>(idx[i]) * d;
        std::copy(src, src + d, v.data() + i * d);
    }
    auto pt = table.node();
    auto indices = idx;
    return make_op({static_cast<int>(idx.size()), d}, std::move(v), {table},
                   [pt, indices, d](TensorNode& o) {
                       if (!pt->requires_grad) return;
                       ensure_grad(*pt);
                       for (std::size_t i = 0; i < indices.size(); ++i) {
                           real* dst = pt->grad.data() + static_cast<std::size_t>(indices[i]) * d;
                           const real* g = o.grad.data() + i * d;
                           for (int j = 0; j < d; ++j) dst[j] += g[j];
                       }
                   });
}

// --- conv nets ---------------------------------------------------------------

namespace {

void im2col(const real* x, int ci, int h, int w, int kh, int kw, int stride, int pad,
            int ho, int wo, real* cols) {
    // cols is [(ci*kh*kw) x (ho*wo)], row-major
    for (int c = 0; c < ci; ++c) {
        for (int ki = 0; ki < kh; ++ki) {
            for (int kj = 0; kj < kw; ++kj) {
                real* row = cols + (static_cast<std::size_t>(c) * kh * kw + ki * kw + kj) *
                                       (static_cast<std::size_t>(ho) * wo);
                for (int oi = 0; oi < ho; ++oi) {
                    int ii = oi * stride - pad + ki;
                    for (int oj = 0; oj < wo; ++oj) {
                        int jj = oj * stride - pad + kj;
                        real val = 0.0;
                        if (ii >= 0 && ii < h && jj >= 0 && jj < w)
                            val = x[(static_cast<std::size_t>(c) * h + ii) * w + jj];
                        row[static_cast<std::size_t>(oi) * wo + oj] = val;
                    }
                }
            }
        }
    }
}

void col2im(const real* cols, int ci, int h, int w, int kh, int kw, int stride, int pad,
            int ho, int wo, real* dx) {
    for (int c = 0; c < ci; ++c) {
        for (int ki = 0; ki < kh; ++ki) {
            for (int kj = 0; kj < kw; ++kj) {
                const real* row = cols + (static_cast<std::size_t>(c) * kh * kw + ki * kw + kj) *
                                             (static_cast<std::size_t>(ho) * wo);
                for (int oi = 0; oi < ho; ++oi) {
                    int ii = oi * stride - pad + ki;
                    if (ii < 0 || ii >= h) continue;
                    for (int oj = 0; oj < wo; ++oj) {
                        int jj = oj * stride - pad + kj;
                        if (jj < 0 || jj >= w) continue;
                        dx[(static_cast<std::size_t>(c) * h + ii) * w + jj] +=
                            row[static_cast<std::size_t>(oi) * wo + oj];
                    }
                }
            }
        }
    }
}

} // namespace

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad) {
    check(x.shape().size() == 3 && w.shape().size() == 4, "conv2d: bad ranks");
    int ci = x.shape()[0], h = x.shape()[1], wd = x.shape()[2];
    int co = w.shape()[0], kh = w.shape()[2], kw = w.shape()[3];
    check(w.shape()[1] == ci, "conv2d: channel mismatch");
    check(b.shape() == Shape{co}, "conv2d: bias shape mismatch");
    int ho = (h + 2 * pad - kh) / stride + 1;
    int wo = (wd + 2 * pad - kw) / stride + 1;
    check(ho > 0 && wo > 0, "conv2d: empty output");

    int k = ci * kh * kw;
    int npix = ho * wo;
    auto cols = std::make_shared<std::vector<real>>(static_cast<std::size_t>(k) * npix);
    im2col(x.data().data(), ci, h, wd, kh, kw, stride, pad, ho, wo, cols->data());

    std::vector<real> v(static_cast<std::size_t>(co) * npix);
    {
        CMatMap W(w.data().data(), co, k), C(cols->data(), k, npix);
        MatMap O(v.data(), co, npix);
        O.noalias() = W * C;
        for (int c = 0; c < co; ++c) O.row(c).array() += b.at(static_cast<std::size_t>(c));
    }

    auto px = x.node(), pw = w.node(), pb = b.node();
    return make_op({co, ho, wo}, std::move(v), {x, w, b},
                   [px, pw, pb, cols, ci, h, wd, kh, kw, stride, pad, ho, wo, co, k,
                    npix](TensorNode& o) {
                       CMatMap G(o.grad.data(), co, npix);
                       if (pw->requires_grad) {
                           ensure_grad(*pw);
                           CMatMap C(cols->data(), k, npix);
                           MatMap dW(pw->grad.data(), co, k);
                           dW.noalias() += G * C.transpose();
                       }
                       if (pb->requires_grad) {
                           ensure_grad(*pb);
                           for (int c = 0; c < co; ++c) pb->grad[static_cast<std::size_t>(c)] += G.row(c).sum();
                       }
                       if (px->requires_grad) {
                           ensure_grad(*px);
                           std::vector<real> dcols(static_cast<std::size_t>(k) * npix);
                           CMatMap W(pw->val.data(), co, k);
                           MatMap dC(dcols.data(), k, npix);
                           dC.noalias() = W.transpose() * G;
                           col2im(dcols.data(), ci, h, wd, kh, kw, stride, pad, ho, wo,
                                  px->grad.data());
                       }
                   });
}

Tensor upsample2x(const Tensor& x) {
    check(x.shape().size() == 3, "upsample2x: expect [C,H,W]");
    int c = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
    std::vector<real> v(static_cast<std::size_t>(c) * 4 * h * w);
    for (int ch = 0; ch < c; ++ch)
        for (int i = 0; i < 2 * h; ++i)
            for (int j = 0; j < 2 * w; ++j)
                v[(static_cast<std::size_t>(ch) * 2 * h + i) * 2 * w + j] =
                    x.at((static_cast<std::size_t>(ch) * h + i / 2) * w + j / 2);
    auto px = x.node();
    return make_op({c, 2 * h, 2 * w}, std::move(v), {x}, [px, c, h, w](TensorNode& o) {
        if (!px->requires_grad) return;
        ensure_grad(*px);
        for (int ch = 0; ch < c; ++ch)
            for (int i = 0; i < 2 * h; ++i)
                for (int j = 0; j < 2 * w; ++j)
                    px->grad[(static_cast<std::size_t>(ch) * h + i / 2) * w + j / 2] +=
                        o.grad[(static_cast<std::size_t>(ch) * 2 * h + i) * 2 * w + j];
    });
}

Tensor global_avg_pool(const Tensor& x) {
    check(x.shape().size() == 3, "global_avg_pool: expect [C,H,W]");
    int c = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
    real inv = 1.0 / static_cast<real>(h * w);
    std::vector<real> v(static_cast<std::size_t>(c));
    for (int ch = 0; ch < c; ++ch) {
        real s = 0.0;
        const real* p = x.data().data() + static_cast<std::size_t>(ch) * h * w;
        for (int i = 0; i < h * w; ++i) s += p[i];
        v[static_cast<std::size_t>(ch)] = s * inv;
    }
    auto px = x.node();
    return make_op({c}, std::move(v), {x}, [px, c, h, w, inv](TensorNode& o) {
        if (!px->requires_grad) return;
        ensure_grad(*px);
        for (int ch = 0; ch < c; ++ch) {
            real g = o.grad[static_cast<std::size_t>(ch)] * inv;
            real* p = px->grad.data() + static_cast<std::size_t>(ch) * h * w;
            for (int i = 0; i < h * w; ++i) p[i] += g;
        }
    });
}

} // namespace delight
