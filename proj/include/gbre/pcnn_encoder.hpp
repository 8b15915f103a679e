#pragma once

#include <vector>

#include "gbre/autodiff.hpp"
#include "gbre/ops.hpp"

namespace gbre::pcnn {

// PCNN sentence encoder: position features, same-length convolution,
// piecewise max pooling over the three entity-delimited segments, ReLU.

// x_l = [input_l ; pos_head[off_head[l]] ; pos_tail[off_tail[l]]]. Only the
// first L offsets are consumed, where L is the row count of `input`.
Var append_position_features(Tape& t, Var input, const std::vector<int>& off_head,
                             const std::vector<int>& off_tail, Var pos_head_table,
                             Var pos_tail_table);

// Kernels (c x window*D) slide over rows of x (L x D); output c x L.
Var convolve(Tape& t, Var x, Var kernels, Var bias, int window);

// Segment maxima around 0-based entity positions k_first <= k_second:
// [0,k_first], (k_first,k_second], (k_second,L). Output c x 3; an empty
// trailing segment pools to 0 pre-activation.
Var piecewise_pool(Tape& t, Var conv_out, int k_first, int k_second);

// Full encoder; output is a nonnegative vector of width 3c.
Var encode_sentence(Tape& t, Var input, const std::vector<int>& off_head,
                    const std::vector<int>& off_tail, int k_first, int k_second,
                    Var pos_head_table, Var pos_tail_table, Var kernels, Var bias, int window);

}  // namespace gbre::pcnn
