#pragma once

#include <array>
#include <optional>

#include "vsod/image.hpp"
#include "vsod/nn/ops.hpp"

namespace vsod {

/// Pixels of a supervision target stored at the 8-bit maximum (value 1.0).
struct PeakSet {
    BinaryMask mask;
    int count = 0;
};

/// Throws if the target has no saturated pixel; such targets cannot drive
/// the peak-normalized loss term.
PeakSet peak_set(const GrayMap& q);

// Differentiable loss terms. p is a live tape value whose element count
// matches the target; targets enter as constants.
//
// All statistics (mean/stddev) are over the full map; stddevs carry a
// sqrt(var + 1e-12) guard so constant maps stay finite.

/// (1/N) sum_i [ zscore(F) - zscore(P) ]_i * F_i over the peak indicator F.
nn::Value nss_prime(nn::Value p, const PeakSet& peaks);

/// Pearson correlation, in [-1,1] up to the epsilon guard.
nn::Value cc(nn::Value p, const GrayMap& q);

/// 1 - cc.
nn::Value cc_prime(nn::Value p, const GrayMap& q);

/// KL divergence after normalizing both maps to unit sum;
/// sum_i Q_i log(Q_i / (P_i + 1e-8)), zero-mass target terms contribute 0.
nn::Value kld(nn::Value p, const GrayMap& q);

/// nss_prime + cc_prime + kld with the peak set derived from q.
nn::Value body_attention_loss(nn::Value p, const GrayMap& q);

/// Sum of body_attention_loss over the five supervision maps.
nn::Value total_locating_loss(const std::array<nn::Value, 5>& stack, const GrayMap& q);

// Plain evaluations of the same definitions (no gradient needed).
double nss_prime(const GrayMap& p, const PeakSet& peaks);
double cc(const GrayMap& p, const GrayMap& q);
double cc_prime(const GrayMap& p, const GrayMap& q);
double kld(const GrayMap& p, const GrayMap& q);
double body_attention_loss(const GrayMap& p, const GrayMap& q);

/// Class-balanced binary cross-entropy against a 0/1 edge target; used by
/// the fine-segmentation edge supervision. Returns nullopt when the target
/// has a single class (nothing to balance).
std::optional<nn::Value> balanced_bce(nn::Value p, const BinaryMask& target);

nn::Value gray_const(const GrayMap& m);

}  // namespace vsod
