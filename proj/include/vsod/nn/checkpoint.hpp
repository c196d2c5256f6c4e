#pragma once

#include <map>
#include <string>

#include "vsod/nn/params.hpp"

namespace vsod::nn {

// Versioned checkpoint container: named tensors plus a free-form metadata
// block (the network config that produced them). Writes are atomic
// (temp file + rename) so an interrupted run never leaves a torn file.
void save_checkpoint(const std::string& path, const ParamStore& params,
                     const std::map<std::string, std::string>& meta);

struct CheckpointData {
    std::map<std::string, std::string> meta;
    std::vector<std::pair<std::string, Tensor>> tensors;
};

CheckpointData read_checkpoint(const std::string& path);

/// Copies stored tensors into an existing registry; every registered
/// parameter must be present with the exact shape or this throws.
void load_checkpoint(const std::string& path, ParamStore& params,
                     std::map<std::string, std::string>* meta_out = nullptr);

}  // namespace vsod::nn
