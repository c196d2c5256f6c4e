#pragma once

#include "vsod/nn/graph.hpp"

namespace vsod::nn {

// elementwise, same shape
Value add(Value a, Value b);
Value sub(Value a, Value b);
Value mul(Value a, Value b);
Value div(Value a, Value b);

// tensor (+|-|*|/) broadcast scalar Value
Value add_s(Value a, Value s);
Value sub_s(Value a, Value s);
Value mul_s(Value a, Value s);
Value div_s(Value a, Value s);

// constants
Value scale(Value a, double k);
Value offset(Value a, double k);

Value vlog(Value a);
Value vsqrt(Value a);
Value sigmoid(Value a);
Value leaky_relu(Value a, double slope = 0.01);

Value sum(Value a);   // -> {1}
Value mean(Value a);  // -> {1}

/// x {C,H,W}, w {O,C,Kh,Kw}, b {O}; zero padding.
Value conv2d(Value x, Value w, Value b, int stride, int pad);

/// Bilinear (pixel-center) resample of {C,H,W} to {C,out_h,out_w}, edge clamp.
Value resize_bilinear(Value x, int out_h, int out_w);

/// Non-overlapping k-window average; trailing windows shrink at the edge.
Value avg_pool(Value x, int k);

Value global_avg_pool(Value x);  // {C,H,W} -> {1}, mean over all entries

}  // namespace vsod::nn
