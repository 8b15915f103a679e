#pragma once

#include <vector>

#include "gbre/autodiff.hpp"
#include "gbre/ops.hpp"

namespace gbre::qs {

// Bidirectional query-sentence attention. Sentence rows S (L x d) and query
// rows Q (T x d) are coupled through a trainable scoring vector w_h of
// length 3d; the result is an L x 3d query-aware sentence matrix.

// H[l][t] = w_h . [s_l ; q_t ; s_l o q_t]
Var similarity_matrix(Tape& t, Var sent, Var query, Var w_h);

// Adds a -1e9 surrogate at masked rows/columns so downstream softmaxes give
// them exactly zero weight. Empty masks mean fully valid.
Var apply_mask(Tape& t, Var h, const std::vector<char>& sent_valid,
               const std::vector<char>& query_valid);

struct SentenceToQuery {
  Var fused;  // L x d, per-position mixtures of query words
  Var alpha;  // L x T row-stochastic attention
};
SentenceToQuery s2q_attention(Tape& t, Var h_masked, Var query);

struct QueryToSentence {
  Var tiled;    // L x d, the attended sentence summary tiled to every row
  Var weights;  // length-L attention over sentence positions
};
QueryToSentence q2s_attention(Tape& t, Var h_masked, Var sent);

// x_l = [s_l ; s_l o q2s-free mixture ; s_l o summary]; rows at masked
// positions are zeroed. Output L x 3d.
Var fuse(Tape& t, Var sent, Var s2q_fused, Var q2s_tiled, const std::vector<char>& sent_valid);

struct QueryAware {
  Var fused;       // L x 3d
  Var s2q_alpha;   // L x T
  Var q2s_weights; // L
};
QueryAware query_aware(Tape& t, Var sent, Var query, Var w_h,
                       const std::vector<char>& sent_valid,
                       const std::vector<char>& query_valid);

}  // namespace gbre::qs
