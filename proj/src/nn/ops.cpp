#include "vsod/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vsod::nn {

namespace {

void require_same_shape(const Value& a, const Value& b, const char* op) {
    if (!a->val.same_shape(b->val))
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + a->val.shape_str() +
                                    " vs " + b->val.shape_str());
}

void require_scalar(const Value& s, const char* op) {
    if (s->val.numel() != 1)
        throw std::invalid_argument(std::string(op) + ": expected scalar, got " +
                                    s->val.shape_str());
}

Value make_result(Tensor t, std::vector<Value> inputs, std::function<void(Node&)> backprop) {
    bool any_grad = false;
    for (const auto& in : inputs) any_grad = any_grad || in->requires_grad;
    Value out = make_value(std::move(t), any_grad);
    out->inputs = std::move(inputs);
    if (any_grad) out->backprop = std::move(backprop);
    return out;
}

}  // namespace

Value add(Value a, Value b) {
    require_same_shape(a, b, "add");
    Tensor t(a->val.shape());
    for (size_t i = 0; i < t.numel(); ++i) t[i] = a->val[i] + b->val[i];
    return make_result(std::move(t), {a, b}, [](Node& n) {
        for (int k = 0; k < 2; ++k) {
            Node& in = *n.inputs[k];
            if (!in.requires_grad) continue;
            Tensor& g = in.grad_buf();
            for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i];
        }
    });
}

Value sub(Value a, Value b) {
    require_same_shape(a, b, "sub");
    Tensor t(a->val.shape());
    for (size_t i = 0; i < t.numel(); ++i) t[i] = a->val[i] - b->val[i];
    return make_result(std::move(t), {a, b}, [](Node& n) {
        if (n.inputs[0]->requires_grad) {
            Tensor& g = n.inputs[0]->grad_buf();
            for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i];
        }
        if (n.inputs[1]->requires_grad) {
            Tensor& g = n.inputs[1]->grad_buf();
            for (size_t i = 0; i < g.numel(); ++i) g[i] -= n.grad[i];
        }
    });
}

Value mul(Value a, Value b) {
    require_same_shape(a, b, "mul");
    Tensor t(a->val.shape());
    for (size_t i = 0; i < t.numel(); ++i) t[i] = a->val[i] * b->val[i];
    return make_result(std::move(t), {a, b}, [](Node& n) {
        Node& a = *n.inputs[0];
        Node& b = *n.inputs[1];
        if (a.requires_grad) {
            Tensor& g = a.grad_buf();
            for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i] * b.val[i];
        }
        if (b.requires_grad) {
            Tensor& g = b.grad_buf();
            for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i] * a.val[i];
        }
    });
}

Value div(Value a, Value b) {
    require_same_shape(a, b, "div");
    Tensor t(a->val.shape());
    for (size_t i = 0; i < t.numel(); ++i) t[i] = a->val[i] / b->val[i];
    return make_result(std::move(t), {a, b}, [](Node& n) {
        Node& a = *n.inputs[0];
        Node& b = *n.inputs[1];
        if (a.requires_grad) {
            Tensor& g = a.grad_buf();
            for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i] / b.val[i];
        }
        if (b.requires_grad) {
            Tensor& g = b.grad_buf();
            for (size_t i = 0; i < g.numel(); ++i)
                g[i] -= n.grad[i] * a.val[i] / (b.val[i] * b.val[i]);
        }
    });
}

Value add_s(Value a, Value s) {
    require_scalar(s, "add_s");
    Tensor t(a->val.shape());
    double sv = s->val[0];
    for (size_t i = 0; i < t.numel(); ++i) t[i] = a->val[i] + sv;
    return make_result(std::move(t), {a, s}, [](Node& n) {
        if (n.inputs[0]->requires_grad) {
            Tensor& g = n.inputs[0]->grad_buf();
            for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i];
        }
        if (n.inputs[1]->requires_grad) {
            double acc = 0.0;
            for (size_t i = 0; i < n.grad.numel(); ++i) acc += n.grad[i];
            n.inputs[1]->grad_buf()[0] += acc;
        }
    });
}

Value sub_s(Value a, Value s) {
    require_scalar(s, "sub_s");
    Tensor t(a->val.shape());
    double sv = s->val[0];
    for (size_t i = 0; i < t.numel(); ++i) t[i] = a->val[i] - sv;
    return make_result(std::move(t), {a, s}, [](Node& n) {
        if (n.inputs[0]->requires_grad) {
            Tensor& g = n.inputs[0]->grad_buf();
            for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i];
        }
        if (n.inputs[1]->requires_grad) {
            double acc = 0.0;
            for (size_t i = 0; i < n.grad.numel(); ++i) acc += n.grad[i];
            n.inputs[1]->grad_buf()[0] -= acc;
        }
    });
}

Value mul_s(Value a, Value s) {
    require_scalar(s, "mul_s");
    Tensor t(a->val.shape());
    double sv = s->val[0];
    for (size_t i = 0; i < t.numel(); ++i) t[i] = a->val[i] * sv;
    return make_result(std::move(t), {a, s}, [](Node& n) {
        Node& a = *n.inputs[0];
        Node& s = *n.inputs[1];
        if (a.requires_grad) {
            Tensor& g = a.grad_buf();
            for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i] * s.val[0];
        }
        if (s.requires_grad) {
            double acc = 0.0;
            for (size_t i = 0; i < n.grad.numel(); ++i) acc += n.grad[i] * a.val[i];
            s.grad_buf()[0] += acc;
        }
    });
}

Value div_s(Value a, Value s) {
    require_scalar(s, "div_s");
    Tensor t(a->val.shape());
    double sv = s->val[0];
    for (size_t i = 0; i < t.numel(); ++i) t[i] = a->val[i] / sv;
    return make_result(std::move(t), {a, s}, [](Node& n) {
        Node& a = *n.inputs[0];
        Node& s = *n.inputs[1];
        double sv = s.val[0];
        if (a.requires_grad) {
            Tensor& g = a.grad_buf();
            for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i] / sv;
        }
        if (s.requires_grad) {
            double acc = 0.0;
            for (size_t i = 0; i < n.grad.numel(); ++i) acc += n.grad[i] * a.val[i];
            s.grad_buf()[0] -= acc / (sv * sv);
        }
    });
}

Value scale(Value a, double k) {
    Tensor t(a->val.shape());
    for (size_t i = 0; i < t.numel(); ++i) t[i] = a->val[i] * k;
    return make_result(std::move(t), {a}, [k](Node& n) {
        Tensor& g = n.inputs[0]->grad_buf();
        for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i] * k;
    });
}

Value offset(Value a, double k) {
    Tensor t(a->val.shape());
    for (size_t i = 0; i < t.numel(); ++i) t[i] = a->val[i] + k;
    return make_result(std::move(t), {a}, [](Node& n) {
        Tensor& g = n.inputs[0]->grad_buf();
        for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i];
    });
}

Value vlog(Value a) {
    Tensor t(a->val.shape());
    for (size_t i = 0; i < t.numel(); ++i) t[i] = std::log(a->val[i]);
    return make_result(std::move(t), {a}, [](Node& n) {
        Tensor& g = n.inputs[0]->grad_buf();
        for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i] / n.inputs[0]->val[i];
    });
}

Value vsqrt(Value a) {
    Tensor t(a->val.shape());
    for (size_t i = 0; i < t.numel(); ++i) t[i] = std::sqrt(a->val[i]);
    return make_result(std::move(t), {a}, [](Node& n) {
        Tensor& g = n.inputs[0]->grad_buf();
        for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i] * 0.5 / n.val[i];
    });
}

Value sigmoid(Value a) {
    Tensor t(a->val.shape());
    for (size_t i = 0; i < t.numel(); ++i) t[i] = 1.0 / (1.0 + std::exp(-a->val[i]));
    return make_result(std::move(t), {a}, [](Node& n) {
        Tensor& g = n.inputs[0]->grad_buf();
        for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[i] * n.val[i] * (1.0 - n.val[i]);
    });
}

Value leaky_relu(Value a, double slope) {
    Tensor t(a->val.shape());
    for (size_t i = 0; i < t.numel(); ++i) {
        double v = a->val[i];
        t[i] = v > 0.0 ? v : slope * v;
    }
    return make_result(std::move(t), {a}, [slope](Node& n) {
        Tensor& g = n.inputs[0]->grad_buf();
        for (size_t i = 0; i < g.numel(); ++i)
            g[i] += n.grad[i] * (n.inputs[0]->val[i] > 0.0 ? 1.0 : slope);
    });
}

Value sum(Value a) {
    double acc = 0.0;
    for (size_t i = 0; i < a->val.numel(); ++i) acc += a->val[i];
    return make_result(Tensor::scalar(acc), {a}, [](Node& n) {
        Tensor& g = n.inputs[0]->grad_buf();
        for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[0];
    });
}

Value mean(Value a) {
    double inv = 1.0 / static_cast<double>(a->val.numel());
    double acc = 0.0;
    for (size_t i = 0; i < a->val.numel(); ++i) acc += a->val[i];
    return make_result(Tensor::scalar(acc * inv), {a}, [inv](Node& n) {
        Tensor& g = n.inputs[0]->grad_buf();
        for (size_t i = 0; i < g.numel(); ++i) g[i] += n.grad[0] * inv;
    });
}

Value conv2d(Value x, Value w, Value b, int stride, int pad) {
    const Tensor& xv = x->val;
    const Tensor& wv = w->val;
    if (xv.rank() != 3 || wv.rank() != 4)
        throw std::invalid_argument("conv2d: expected x {C,H,W}, w {O,C,Kh,Kw}");
    const int C = xv.dim(0), H = xv.dim(1), W = xv.dim(2);
    const int O = wv.dim(0), KC = wv.dim(1), KH = wv.dim(2), KW = wv.dim(3);
    if (KC != C) throw std::invalid_argument("conv2d: channel mismatch");
    if (b->val.numel() != static_cast<size_t>(O))
        throw std::invalid_argument("conv2d: bias size mismatch");
    if (stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
    const int OH = (H + 2 * pad - KH) / stride + 1;
    const int OW = (W + 2 * pad - KW) / stride + 1;
    if (OH < 1 || OW < 1) throw std::invalid_argument("conv2d: output collapses to zero size");

    Tensor t({O, OH, OW});
    const double* xd = xv.data();
    const double* wd = wv.data();
    const double* bd = b->val.data();
    double* td = t.data();
    for (int o = 0; o < O; ++o) {
        for (int oy = 0; oy < OH; ++oy) {
            for (int ox = 0; ox < OW; ++ox) {
                double acc = bd[o];
                const int iy0 = oy * stride - pad;
                const int ix0 = ox * stride - pad;
                for (int c = 0; c < C; ++c) {
                    const double* xc = xd + static_cast<size_t>(c) * H * W;
                    const double* wc = wd + ((static_cast<size_t>(o) * C + c) * KH) * KW;
                    for (int ky = 0; ky < KH; ++ky) {
                        const int iy = iy0 + ky;
                        if (iy < 0 || iy >= H) continue;
                        const double* xrow = xc + static_cast<size_t>(iy) * W;
                        const double* wrow = wc + static_cast<size_t>(ky) * KW;
                        for (int kx = 0; kx < KW; ++kx) {
                            const int ix = ix0 + kx;
                            if (ix < 0 || ix >= W) continue;
                            acc += wrow[kx] * xrow[ix];
                        }
                    }
                }
                td[(static_cast<size_t>(o) * OH + oy) * OW + ox] = acc;
            }
        }
    }

    auto backprop = [C, H, W, O, KH, KW, OH, OW, stride, pad](Node& n) {
        Node& xn = *n.inputs[0];
        Node& wn = *n.inputs[1];
        Node& bn = *n.inputs[2];
        const double* gd = n.grad.data();
        const double* xd = xn.val.data();
        const double* wd = wn.val.data();
        double* gx = xn.requires_grad ? xn.grad_buf().data() : nullptr;
        double* gw = wn.requires_grad ? wn.grad_buf().data() : nullptr;
        double* gb = bn.requires_grad ? bn.grad_buf().data() : nullptr;
        for (int o = 0; o < O; ++o) {
            for (int oy = 0; oy < OH; ++oy) {
                for (int ox = 0; ox < OW; ++ox) {
                    const double g = gd[(static_cast<size_t>(o) * OH + oy) * OW + ox];
                    if (g == 0.0) continue;
                    if (gb) gb[o] += g;
                    const int iy0 = oy * stride - pad;
                    const int ix0 = ox * stride - pad;
                    for (int c = 0; c < C; ++c) {
                        const size_t xoff = static_cast<size_t>(c) * H * W;
                        const size_t woff = ((static_cast<size_t>(o) * C + c) * KH) * KW;
                        for (int ky = 0; ky < KH; ++ky) {
                            const int iy = iy0 + ky;
                            if (iy < 0 || iy >= H) continue;
                            for (int kx = 0; kx < KW; ++kx) {
                                const int ix = ix0 + kx;
                                if (ix < 0 || ix >= W) continue;
                                const size_t xi = xoff + static_cast<size_t>(iy) * W + ix;
                                const size_t wi = woff + static_cast<size_t>(ky) * KW + kx;
                                if (gx) gx[xi] += g * wd[wi];
                                if (gw) gw[wi] += g * xd[xi];
                            }
                        }
                    }
                }
            }
        }
    };
    return make_result(std::move(t), {x, w, b}, backprop);
}

namespace {

// pixel-center resize table: out index -> (first source index, lerp weight)
void resize_table(int in_n, int out_n, std::vector<int>& i0, std::vector<double>& frac) {
    i0.resize(out_n);
    frac.resize(out_n);
    double s = static_cast<double>(in_n) / out_n;
    for (int i = 0; i < out_n; ++i) {
        double pos = (i + 0.5) * s - 0.5;
        pos = std::clamp(pos, 0.0, static_cast<double>(in_n - 1));
        int lo = std::min(static_cast<int>(pos), in_n > 1 ? in_n - 2 : 0);
        i0[i] = lo;
        frac[i] = in_n > 1 ? pos - lo : 0.0;
    }
}

}  // namespace

Value resize_bilinear(Value x, int out_h, int out_w) {
    const Tensor& xv = x->val;
    if (xv.rank() != 3) throw std::invalid_argument("resize_bilinear: expected {C,H,W}");
    const int C = xv.dim(0), H = xv.dim(1), W = xv.dim(2);
    if (H == out_h && W == out_w) return x;  // no-op shortcut keeps maps bit-identical

    auto y0 = std::make_shared<std::vector<int>>();
    auto x0 = std::make_shared<std::vector<int>>();
    auto fy = std::make_shared<std::vector<double>>();
    auto fx = std::make_shared<std::vector<double>>();
    resize_table(H, out_h, *y0, *fy);
    resize_table(W, out_w, *x0, *fx);

    Tensor t({C, out_h, out_w});
    for (int c = 0; c < C; ++c) {
        const double* src = xv.data() + static_cast<size_t>(c) * H * W;
        double* dst = t.data() + static_cast<size_t>(c) * out_h * out_w;
        for (int r = 0; r < out_h; ++r) {
            int r0 = (*y0)[r], r1 = std::min(r0 + 1, H - 1);
            double wy = (*fy)[r];
            for (int cc = 0; cc < out_w; ++cc) {
                int c0 = (*x0)[cc], c1 = std::min(c0 + 1, W - 1);
                double wx = (*fx)[cc];
                dst[static_cast<size_t>(r) * out_w + cc] =
                    (1 - wy) * ((1 - wx) * src[static_cast<size_t>(r0) * W + c0] +
                                wx * src[static_cast<size_t>(r0) * W + c1]) +
                    wy * ((1 - wx) * src[static_cast<size_t>(r1) * W + c0] +
                          wx * src[static_cast<size_t>(r1) * W + c1]);
            }
        }
    }

    auto backprop = [C, H, W, out_h, out_w, y0, x0, fy, fx](Node& n) {
        Node& xn = *n.inputs[0];
        if (!xn.requires_grad) return;
        double* gx = xn.grad_buf().data();
        const double* g = n.grad.data();
        for (int c = 0; c < C; ++c) {
            double* gc = gx + static_cast<size_t>(c) * H * W;
            const double* go = g + static_cast<size_t>(c) * out_h * out_w;
            for (int r = 0; r < out_h; ++r) {
                int r0 = (*y0)[r], r1 = std::min(r0 + 1, H - 1);
                double wy = (*fy)[r];
                for (int cc = 0; cc < out_w; ++cc) {
                    int c0 = (*x0)[cc], c1 = std::min(c0 + 1, W - 1);
                    double wx = (*fx)[cc];
                    double gv = go[static_cast<size_t>(r) * out_w + cc];
                    gc[static_cast<size_t>(r0) * W + c0] += gv * (1 - wy) * (1 - wx);
                    gc[static_cast<size_t>(r0) * W + c1] += gv * (1 - wy) * wx;
                    gc[static_cast<size_t>(r1) * W + c0] += gv * wy * (1 - wx);
                    gc[static_cast<size_t>(r1) * W + c1] += gv * wy * wx;
                }
            }
        }
    };
    return make_result(std::move(t), {x}, backprop);
}

Value avg_pool(Value x, int k) {
    const Tensor& xv = x->val;
    if (xv.rank() != 3) throw std::invalid_argument("avg_pool: expected {C,H,W}");
    if (k < 1) throw std::invalid_argument("avg_pool: window must be >= 1");
    const int C = xv.dim(0), H = xv.dim(1), W = xv.dim(2);
    const int OH = (H + k - 1) / k, OW = (W + k - 1) / k;
    Tensor t({C, OH, OW});
    for (int c = 0; c < C; ++c) {
        for (int oy = 0; oy < OH; ++oy) {
            int y1 = std::min((oy + 1) * k, H);
            for (int ox = 0; ox < OW; ++ox) {
                int x1 = std::min((ox + 1) * k, W);
                double acc = 0.0;
                for (int y = oy * k; y < y1; ++y)
                    for (int xx = ox * k; xx < x1; ++xx)
                        acc += xv[(static_cast<size_t>(c) * H + y) * W + xx];
                double area = static_cast<double>(y1 - oy * k) * (x1 - ox * k);
                t[(static_cast<size_t>(c) * OH + oy) * OW + ox] = acc / area;
            }
        }
    }
    auto backprop = [C, H, W, OH, OW, k](Node& n) {
        Node& xn = *n.inputs[0];
        if (!xn.requires_grad) return;
        double* gx = xn.grad_buf().data();
        for (int c = 0; c < C; ++c) {
            for (int oy = 0; oy < OH; ++oy) {
                int y1 = std::min((oy + 1) * k, H);
                for (int ox = 0; ox < OW; ++ox) {
                    int x1 = std::min((ox + 1) * k, W);
                    double area = static_cast<double>(y1 - oy * k) * (x1 - ox * k);
                    double g = n.grad[(static_cast<size_t>(c) * OH + oy) * OW + ox] / area;
                    for (int y = oy * k; y < y1; ++y)
                        for (int xx = ox * k; xx < x1; ++xx)
                            gx[(static_cast<size_t>(c) * H + y) * W + xx] += g;
                }
            }
        }
    };
    return make_result(std::move(t), {x}, backprop);
}

Value global_avg_pool(Value x) { return mean(x); }

}  // namespace vsod::nn
