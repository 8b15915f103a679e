#pragma once

#include "gbre/autodiff.hpp"
#include "gbre/ops.hpp"
#include "gbre/rng.hpp"

namespace gbre::bag {

struct GraphOutput {
  Var updated;  // N x 3c, each row a relevance-weighted mixture of the bag
  Var alpha;    // N x N row-stochastic attention (exposed for introspection)
};

// One round of message passing over the fully connected sentence graph:
// e_ij = cosine(s_i, s_j), alpha = row softmax of e, s'_i = sum_j alpha_ij s_j.
// Dropout (when rate > 0 and rng given) applies to the updated rows;
// evaluation passes rate 0.
GraphOutput self_attention(Tape& t, Var sentences, double dropout_rate, Rng* rng);

}  // namespace gbre::bag
