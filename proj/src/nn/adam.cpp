#include "vsod/nn/adam.hpp"

#include <cmath>

namespace vsod::nn {

Adam::Adam(std::vector<Value> params, double lr, double weight_decay, double beta1, double beta2,
           double eps)
    : params_(std::move(params)),
      lr_(lr),
      weight_decay_(weight_decay),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const auto& p : params_) {
        m_.emplace_back(p->val.shape());
        v_.emplace_back(p->val.shape());
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (size_t k = 0; k < params_.size(); ++k) {
        Node& p = *params_[k];
        if (p.grad.numel() == 0) continue;  // parameter untouched this step
        Tensor& m = m_[k];
        Tensor& v = v_[k];
        for (size_t i = 0; i < p.val.numel(); ++i) {
            double g = p.grad[i] + weight_decay_ * p.val[i];
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
            double mhat = m[i] / bc1;
            double vhat = v[i] / bc2;
            p.val[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

void Adam::zero_grad() { nn::zero_grad(params_); }

}  // namespace vsod::nn
