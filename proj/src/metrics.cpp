#include "vsod/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace vsod {

double accurate_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    size_t half = xs.size() / 2;
    return accurate_sum(xs.first(half)) + accurate_sum(xs.subspan(half));
}

SoftIou soft_iou(const GrayMap& s, const GrayMap& g) {
    if (!s.same_size(g)) throw std::invalid_argument("soft_iou: size mismatch");
    std::vector<double> inter(s.size()), uni(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        double p = s.v[i] * g.v[i];
        inter[i] = p;
        uni[i] = s.v[i] + g.v[i] - p;
    }
    double denom = accurate_sum(uni);
    if (denom == 0.0) return {0.0, true};
    return {accurate_sum(inter) / denom, false};
}

std::optional<double> d_recall(const GrayMap& l, const GrayMap& t) {
    if (!l.same_size(t)) throw std::invalid_argument("d_recall: size mismatch");
    std::vector<double> prod(l.size());
    for (size_t i = 0; i < l.size(); ++i) prod[i] = l.v[i] * t.v[i];
    double denom = accurate_sum(t.v);
    if (denom == 0.0) return std::nullopt;
    return accurate_sum(prod) / denom;
}

std::optional<double> d_precision(const GrayMap& l, const GrayMap& t) {
    if (!l.same_size(t)) throw std::invalid_argument("d_precision: size mismatch");
    std::vector<double> prod(l.size());
    for (size_t i = 0; i < l.size(); ++i) prod[i] = l.v[i] * t.v[i];
    double denom = accurate_sum(l.v);
    if (denom == 0.0) return std::nullopt;
    return accurate_sum(prod) / denom;
}

double mae(const GrayMap& f, const GrayMap& y) {
    if (!f.same_size(y)) throw std::invalid_argument("mae: size mismatch");
    std::vector<double> err(f.size());
    for (size_t i = 0; i < f.size(); ++i) err[i] = std::fabs(f.v[i] - y.v[i]);
    return accurate_sum(err) / static_cast<double>(f.size());
}

PrCurve f_measure_curve(const GrayMap& f, const BinaryMask& y) {
    if (f.h != y.h || f.w != y.w) throw std::invalid_argument("f_measure_curve: size mismatch");
    // One pass: histogram the prediction levels split by GT class, then
    // accumulate counts from the top threshold down.
    std::array<int64_t, 256> pos_hist{}, neg_hist{};
    int64_t gt_total = 0;
    for (size_t i = 0; i < f.size(); ++i) {
        double v = f.v[i];
        // value survives threshold k iff v > k/255; find the first k it fails,
        // using the same predicate a per-threshold scan would
        int level = std::clamp(static_cast<int>(std::floor(v * 255.0)), 0, 255);
        while (level <= 255 && v > level / 255.0) ++level;
        while (level > 0 && !(v > (level - 1) / 255.0)) --level;
        level = std::min(level, 256);
        if (y.v[i]) {
            ++gt_total;
            if (level > 0) ++pos_hist[level - 1];
        } else {
            if (level > 0) ++neg_hist[level - 1];
        }
    }
    PrCurve curve;
    int64_t tp = 0, fp = 0;
    for (int k = 255; k >= 0; --k) {
        tp += pos_hist[k];
        fp += neg_hist[k];
        int64_t pred = tp + fp;
        curve.precision[k] = pred == 0 ? 0.0 : static_cast<double>(tp) / pred;
        curve.recall[k] = gt_total == 0 ? 0.0 : static_cast<double>(tp) / gt_total;
    }
    return curve;
}

double f_beta(double precision, double recall) {
    constexpr double beta_sq = 0.3;
    double denom = beta_sq * precision + recall;
    if (denom == 0.0) return 0.0;
    return (1.0 + beta_sq) * precision * recall / denom;
}

double f_max(const PrCurve& curve) {
    double best = 0.0;
    for (int k = 0; k < 256; ++k) best = std::max(best, f_beta(curve.precision[k], curve.recall[k]));
    return best;
}

}  // namespace vsod
