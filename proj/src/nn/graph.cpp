#include "vsod/nn/graph.hpp"

#include <stdexcept>
#include <unordered_set>

namespace vsod::nn {

Value make_value(Tensor t, bool requires_grad) {
    auto node = std::make_shared<Node>();
    node->val = std::move(t);
    node->requires_grad = requires_grad;
    return node;
}

void backward(const Value& root) {
    if (!root) throw std::invalid_argument("backward: null root");
    if (root->val.numel() != 1) throw std::invalid_argument("backward: root must be scalar");

    // iterative post-order DFS
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, size_t>> stack{{root.get(), 0}};
    visited.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->inputs.size()) {
            Node* child = node->inputs[next++].get();
            if (child->requires_grad && visited.insert(child).second)
                stack.emplace_back(child, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    root->grad_buf()[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* node = *it;
        if (node->requires_grad && node->backprop) node->backprop(*node);
    }
}

void zero_grad(const std::vector<Value>& params) {
    for (const auto& p : params)
        if (p->grad.numel()) p->grad.fill(0.0);
}

}  // namespace vsod::nn
