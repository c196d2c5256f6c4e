#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "vsod/nn/tensor.hpp"

namespace vsod::nn {

struct Node;
using Value = std::shared_ptr<Node>;

/// One vertex of the reverse-mode tape. The graph is rebuilt per forward
/// pass; nodes own their inputs, so a root Value keeps the tape alive.
struct Node {
    Tensor val;
    Tensor grad;  // allocated on demand during backward
    bool requires_grad = false;
    std::vector<Value> inputs;
    std::function<void(Node&)> backprop;  // scatters this->grad into inputs

    Tensor& grad_buf() {
        if (grad.numel() == 0) grad = Tensor(val.shape());
        return grad;
    }
};

Value make_value(Tensor t, bool requires_grad = false);
inline Value make_const(Tensor t) { return make_value(std::move(t), false); }
inline Value make_param(Tensor t) { return make_value(std::move(t), true); }

/// Reverse-mode sweep from a scalar root; accumulates into .grad of every
/// reachable node with requires_grad set.
void backward(const Value& root);

/// Zeroes gradients across a parameter list before a fresh accumulation.
void zero_grad(const std::vector<Value>& params);

}  // namespace vsod::nn
