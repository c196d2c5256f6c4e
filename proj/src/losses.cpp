#include "vsod/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace vsod {

using nn::Value;

namespace {

constexpr double kVarGuard = 1e-12;
constexpr double kKldEps = 1e-8;
constexpr double kPeakTol = 1e-9;

nn::Tensor tensor_of(const GrayMap& m) {
    return nn::Tensor({m.h, m.w}, m.v);
}

void require_matching(const Value& p, size_t n, const char* op) {
    if (p->val.numel() != n)
        throw std::invalid_argument(std::string(op) + ": prediction/target element mismatch");
}

// constant tensor shaped like the prediction (targets may ride along as
// {H,W} next to {1,H,W} network outputs)
Value const_like(const Value& p, std::vector<double> data) {
    return nn::make_const(nn::Tensor(p->val.shape(), std::move(data)));
}

// z-scored copy of a plain map, population statistics, guarded sigma
std::vector<double> zscore(const std::vector<double>& xs) {
    double mu = 0.0;
    for (double x : xs) mu += x;
    mu /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mu) * (x - mu);
    var /= static_cast<double>(xs.size());
    double sd = std::sqrt(var + kVarGuard);
    std::vector<double> out(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) out[i] = (xs[i] - mu) / sd;
    return out;
}

// mean-centered prediction and its guarded stddev on the tape
struct Centered {
    Value dev;    // p - mean(p)
    Value sigma;  // sqrt(var + guard), scalar
};

Centered center(Value p) {
    Value mu = nn::mean(p);
    Value dev = nn::sub_s(p, mu);
    Value var = nn::mean(nn::mul(dev, dev));
    Value sigma = nn::vsqrt(nn::offset(var, kVarGuard));
    return {dev, sigma};
}

}  // namespace

PeakSet peak_set(const GrayMap& q) {
    PeakSet out;
    out.mask = BinaryMask(q.h, q.w);
    for (size_t i = 0; i < q.v.size(); ++i) {
        if (q.v[i] >= 1.0 - kPeakTol) {
            out.mask.v[i] = 1;
            ++out.count;
        }
    }
    if (out.count == 0)
        throw std::invalid_argument("peak_set: target has no saturated (255) pixel");
    return out;
}

Value nss_prime(Value p, const PeakSet& peaks) {
    size_t n = static_cast<size_t>(peaks.mask.h) * peaks.mask.w;
    require_matching(p, n, "nss_prime");

    std::vector<double> f(n);
    for (size_t i = 0; i < n; ++i) f[i] = peaks.mask.v[i] ? 1.0 : 0.0;
    std::vector<double> zf = zscore(f);

    Centered c = center(p);
    Value zp = nn::div_s(c.dev, c.sigma);
    Value bracket = nn::sub(const_like(p, std::move(zf)), zp);
    Value picked = nn::mul(bracket, const_like(p, std::move(f)));
    return nn::scale(nn::sum(picked), 1.0 / peaks.count);
}

Value cc(Value p, const GrayMap& q) {
    require_matching(p, q.size(), "cc");
    // target-side statistics are constants
    std::vector<double> dq(q.size());
    double muq = 0.0;
    for (double x : q.v) muq += x;
    muq /= static_cast<double>(q.size());
    double varq = 0.0;
    for (size_t i = 0; i < q.size(); ++i) {
        dq[i] = q.v[i] - muq;
        varq += dq[i] * dq[i];
    }
    varq /= static_cast<double>(q.size());
    double sq = std::sqrt(varq + kVarGuard);

    Centered c = center(p);
    Value cov = nn::mean(nn::mul(c.dev, const_like(p, std::move(dq))));
    return nn::div(cov, nn::scale(c.sigma, sq));
}

Value cc_prime(Value p, const GrayMap& q) {
    return nn::offset(nn::scale(cc(p, q), -1.0), 1.0);
}

Value kld(Value p, const GrayMap& q) {
    require_matching(p, q.size(), "kld");
    double qsum = 0.0;
    for (double x : q.v) qsum += x;
    if (qsum == 0.0) return nn::make_const(nn::Tensor::scalar(0.0));

    std::vector<double> qn(q.size());
    double const_term = 0.0;  // sum Q log Q over the support
    for (size_t i = 0; i < q.size(); ++i) {
        qn[i] = q.v[i] / qsum;
        if (qn[i] > 0.0) const_term += qn[i] * std::log(qn[i]);
    }

    Value pn = nn::div_s(p, nn::offset(nn::sum(p), kVarGuard));
    Value cross =
        nn::sum(nn::mul(const_like(p, std::move(qn)), nn::vlog(nn::offset(pn, kKldEps))));
    return nn::offset(nn::scale(cross, -1.0), const_term);
}

Value body_attention_loss(Value p, const GrayMap& q) {
    PeakSet peaks = peak_set(q);
    return nn::add(nn::add(nss_prime(p, peaks), cc_prime(p, q)), kld(p, q));
}

Value total_locating_loss(const std::array<Value, 5>& stack, const GrayMap& q) {
    PeakSet peaks = peak_set(q);
    Value total;
    for (const Value& p : stack) {
        Value term = nn::add(nn::add(nss_prime(p, peaks), cc_prime(p, q)), kld(p, q));
        total = total ? nn::add(total, term) : term;
    }
    return total;
}

Value gray_const(const GrayMap& m) { return nn::make_const(tensor_of(m)); }

double nss_prime(const GrayMap& p, const PeakSet& peaks) {
    return nss_prime(gray_const(p), peaks)->val.item();
}
double cc(const GrayMap& p, const GrayMap& q) { return cc(gray_const(p), q)->val.item(); }
double cc_prime(const GrayMap& p, const GrayMap& q) {
    return cc_prime(gray_const(p), q)->val.item();
}
double kld(const GrayMap& p, const GrayMap& q) { return kld(gray_const(p), q)->val.item(); }
double body_attention_loss(const GrayMap& p, const GrayMap& q) {
    return body_attention_loss(gray_const(p), q)->val.item();
}

std::optional<Value> balanced_bce(Value p, const BinaryMask& target) {
    size_t n = static_cast<size_t>(target.h) * target.w;
    require_matching(p, n, "balanced_bce");
    size_t pos = target.count();
    if (pos == 0 || pos == n) return std::nullopt;
    double beta = static_cast<double>(n - pos) / static_cast<double>(n);  // weight on positives
    std::vector<double> wpos(n, 0.0), wneg(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        if (target.v[i])
            wpos[i] = beta;
        else
            wneg[i] = 1.0 - beta;
    }
    // clamp the prediction away from {0,1} with an affine squeeze
    Value safe = nn::offset(nn::scale(p, 1.0 - 2e-7), 1e-7);
    Value lp = nn::vlog(safe);
    Value lq = nn::vlog(nn::offset(nn::scale(safe, -1.0), 1.0));
    Value loss_pos = nn::sum(nn::mul(lp, const_like(p, std::move(wpos))));
    Value loss_neg = nn::sum(nn::mul(lq, const_like(p, std::move(wneg))));
    return nn::scale(nn::add(loss_pos, loss_neg), -1.0 / static_cast<double>(n));
}

}  // namespace vsod
