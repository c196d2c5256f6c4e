#pragma once

#include <vector>

#include "vsod/nn/graph.hpp"

namespace vsod::nn {

/// Adaptive-moment optimizer with decoupled-from-schedule learning rate and
/// L2 weight decay folded into the gradient.
class Adam {
public:
    explicit Adam(std::vector<Value> params, double lr = 5e-5, double weight_decay = 1e-5,
                  double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    void step();
    void zero_grad();

    void set_lr(double lr) { lr_ = lr; }
    double lr() const { return lr_; }

private:
    std::vector<Value> params_;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
    double lr_, weight_decay_, beta1_, beta2_, eps_;
    long t_ = 0;
};

}  // namespace vsod::nn
