#pragma once

#include <utility>
#include <vector>

#include "vsod/image.hpp"

namespace vsod {

/// Separable non-uniform sampling grid. The per-axis maps are strictly
/// increasing, so the mapping between original and sampled coordinates is
/// invertible; restore() uses the same cumulative densities backwards.
struct SamplerGrid {
    int src_h = 0, src_w = 0;
    int out_h = 0, out_w = 0;
    std::vector<double> cdf_y;  // size src_h + 1, 0 .. 1, strictly increasing
    std::vector<double> cdf_x;  // size src_w + 1
    std::vector<double> ys;     // source row coordinate per output row
    std::vector<double> xs;     // source column coordinate per output column
};

/// Resamples the frame so regions with high attention receive more output
/// pixels. Densities come from the attention marginals mixed with a uniform
/// floor (fraction lambda). All-zero attention degenerates to a plain resize.
std::pair<RgbImage, SamplerGrid> attention_sample(const RgbImage& frame, const GrayMap& attn,
                                                  int out_h, int out_w, double lambda = 0.25);

/// Same grid applied to a single-channel map (used for supervision targets).
GrayMap sample_gray(const GrayMap& m, const SamplerGrid& grid);

/// Maps a prediction on the sampled image back to original coordinates.
GrayMap attention_restore(const GrayMap& sampled_pred, const SamplerGrid& grid);

}  // namespace vsod
