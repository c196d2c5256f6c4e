#include "vsod/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace vsod::nn {

namespace {

constexpr char kMagic[4] = {'V', 'S', 'C', 'K'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); }
void write_str(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t read_u32(std::istream& in) {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

std::string read_str(std::istream& in) {
    uint32_t n = read_u32(in);
    if (n > (1u << 20)) throw std::runtime_error("checkpoint: implausible string length");
    std::string s(n, '\0');
    in.read(s.data(), n);
    return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamStore& params,
                     const std::map<std::string, std::string>& meta) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write checkpoint: " + tmp);
        out.write(kMagic, 4);
        write_u32(out, kVersion);
        write_u32(out, static_cast<uint32_t>(meta.size()));
        for (const auto& [k, v] : meta) {
            write_str(out, k);
            write_str(out, v);
        }
        write_u32(out, static_cast<uint32_t>(params.entries().size()));
        for (const auto& [name, value] : params.entries()) {
            write_str(out, name);
            const Tensor& t = value->val;
            write_u32(out, static_cast<uint32_t>(t.rank()));
            for (int d = 0; d < t.rank(); ++d) write_u32(out, static_cast<uint32_t>(t.dim(d)));
            out.write(reinterpret_cast<const char*>(t.data()),
                      static_cast<std::streamsize>(t.numel() * sizeof(double)));
        }
        if (!out) throw std::runtime_error("failed writing checkpoint: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

CheckpointData read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    uint32_t version = read_u32(in);
    if (version != kVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) +
                                 " in " + path);
    CheckpointData data;
    uint32_t nmeta = read_u32(in);
    for (uint32_t i = 0; i < nmeta; ++i) {
        std::string k = read_str(in);
        data.meta[k] = read_str(in);
    }
    uint32_t ntensors = read_u32(in);
    for (uint32_t i = 0; i < ntensors; ++i) {
        std::string name = read_str(in);
        uint32_t rank = read_u32(in);
        if (rank > 8) throw std::runtime_error("checkpoint: implausible tensor rank");
        std::vector<int> shape(rank);
        for (auto& d : shape) d = static_cast<int>(read_u32(in));
        Tensor t(shape);
        in.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(t.numel() * sizeof(double)));
        if (!in) throw std::runtime_error("truncated checkpoint: " + path);
        data.tensors.emplace_back(std::move(name), std::move(t));
    }
    return data;
}

void load_checkpoint(const std::string& path, ParamStore& params,
                     std::map<std::string, std::string>* meta_out) {
    CheckpointData data = read_checkpoint(path);
    if (meta_out) *meta_out = data.meta;
    for (const auto& [name, value] : params.entries()) {
        const Tensor* found = nullptr;
        for (const auto& [tname, t] : data.tensors)
            if (tname == name) {
                found = &t;
                break;
            }
        if (!found)
            throw std::runtime_error("checkpoint " + path + " is missing tensor '" + name + "'");
        if (!found->same_shape(value->val))
            throw std::runtime_error("checkpoint " + path + " tensor '" + name +
                                     "' has shape " + found->shape_str() + ", expected " +
                                     value->val.shape_str());
        value->val = *found;
    }
}

}  // namespace vsod::nn
