#pragma once

#include <string>

#include "vsod/image.hpp"

namespace vsod {

// Middlebury .flo container: float magic 202021.25, int32 width, int32
// height, then row-major interleaved float32 (u,v), little-endian.
FlowField read_flo(const std::string& path);
void write_flo(const std::string& path, const FlowField& flow);

/// Direction on a color wheel, magnitude normalized by the field maximum.
/// An all-zero field renders uniform white.
RgbImage render_flow(const FlowField& flow);

}  // namespace vsod
