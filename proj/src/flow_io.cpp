#include "vsod/flow_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace vsod {

namespace {
constexpr float kFloMagic = 202021.25f;
}

FlowField read_flo(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open flow file: " + path);
    float magic = 0.0f;
    int32_t w = 0, h = 0;
    in.read(reinterpret_cast<char*>(&magic), 4);
    in.read(reinterpret_cast<char*>(&w), 4);
    in.read(reinterpret_cast<char*>(&h), 4);
    if (!in || magic != kFloMagic)
        throw std::runtime_error("bad .flo magic in " + path);
    if (w < 1 || h < 1 || w > 1 << 16 || h > 1 << 16)
        throw std::runtime_error("implausible .flo dimensions in " + path);
    std::vector<float> buf(static_cast<size_t>(w) * h * 2);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
    if (!in) throw std::runtime_error("truncated .flo file: " + path);
    FlowField flow(h, w);
    for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i) {
        flow.u[i] = buf[2 * i];
        flow.vdisp[i] = buf[2 * i + 1];
    }
    return flow;
}

void write_flo(const std::string& path, const FlowField& flow) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write flow file: " + path);
    float magic = kFloMagic;
    int32_t w = flow.w, h = flow.h;
    out.write(reinterpret_cast<const char*>(&magic), 4);
    out.write(reinterpret_cast<const char*>(&w), 4);
    out.write(reinterpret_cast<const char*>(&h), 4);
    std::vector<float> buf(static_cast<size_t>(w) * h * 2);
    for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i) {
        buf[2 * i] = static_cast<float>(flow.u[i]);
        buf[2 * i + 1] = static_cast<float>(flow.vdisp[i]);
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * 4));
    if (!out) throw std::runtime_error("failed writing .flo file: " + path);
}

}  // namespace vsod
