#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vsod/nn/graph.hpp"
#include "vsod/rng.hpp"

namespace vsod::nn {

/// Named parameter registry. Registration order is the canonical order for
/// the optimizer and the checkpoint container, so runs are reproducible.
class ParamStore {
public:
    Value create(const std::string& name, std::vector<int> shape) {
        Value v = make_param(Tensor(std::move(shape)));
        entries_.emplace_back(name, v);
        return v;
    }

    Value find(const std::string& name) const {
        for (const auto& [n, v] : entries_)
            if (n == name) return v;
        return nullptr;
    }

    const std::vector<std::pair<std::string, Value>>& entries() const { return entries_; }

    std::vector<Value> values() const {
        std::vector<Value> out;
        out.reserve(entries_.size());
        for (const auto& [n, v] : entries_) out.push_back(v);
        return out;
    }

    size_t total_count() const {
        size_t n = 0;
        for (const auto& [name, v] : entries_) n += v->val.numel();
        return n;
    }

private:
    std::vector<std::pair<std::string, Value>> entries_;
};

inline void he_normal_init(Tensor& t, int fan_in, Rng& rng) {
    double std = std::sqrt(2.0 / std::max(1, fan_in));
    for (size_t i = 0; i < t.numel(); ++i) t[i] = rng.normal() * std;
}

}  // namespace vsod::nn
