#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "vsod/image.hpp"

namespace vsod {

/// Pairwise summation; order-stable and accurate for large pixel counts.
double accurate_sum(std::span<const double> xs);

struct SoftIou {
    double value = 0.0;
    bool degenerate = false;  // both maps all-zero
};

/// sum(s*g) / sum(s + g - s*g); 0 (degenerate) when both maps are empty.
SoftIou soft_iou(const GrayMap& s, const GrayMap& g);

/// sum(l*t) / sum(t); nullopt when the ground truth is empty.
std::optional<double> d_recall(const GrayMap& l, const GrayMap& t);

/// sum(l*t) / sum(l); nullopt when the prediction is empty.
std::optional<double> d_precision(const GrayMap& l, const GrayMap& t);

double mae(const GrayMap& f, const GrayMap& y);

struct PrCurve {
    std::array<double, 256> precision{};
    std::array<double, 256> recall{};
};

/// Binarizes f at k/255 (strictly greater) for k = 0..255 against a binary
/// ground truth. Empty predictions score precision 0.
PrCurve f_measure_curve(const GrayMap& f, const BinaryMask& y);

/// max over thresholds of (1+b^2) P R / (b^2 P + R), with b^2 = 0.3.
double f_max(const PrCurve& curve);

double f_beta(double precision, double recall);

/// Structure measure: 0.5 * object term + 0.5 * region term, clamped to [0,1].
double s_measure(const GrayMap& f, const BinaryMask& y);

struct MetricReport {
    double s_measure = 0.0;
    double f_max = 0.0;
    double mae = 0.0;
    PrCurve curve;
    int frames = 0;
    int degenerate_frames = 0;  // empty-GT frames, excluded from averages
};

}  // namespace vsod
