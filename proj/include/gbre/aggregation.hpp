#pragma once

#include <string>
#include <vector>

#include "gbre/autodiff.hpp"
#include "gbre/ops.hpp"

namespace gbre::agg {

enum class Mode { att, one, ave };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

struct SelectiveAttention {
  Var bag_vector;  // 3c
  Var beta;        // N, sums to 1
};

// c_i = s'_i diag(a) r, beta = softmax(c), z = sum_i beta_i s'_i.
SelectiveAttention selective_attention(Tape& t, Var sentences, Var att_diag, Var relation_vec);

// Mean of the sentence rows.
Var aggregate_ave(Tape& t, Var sentences);

struct OneChoice {
  Var bag_vector;
  int chosen;  // row index, ties to the lowest index
};
// Picks the row whose classifier probability for the target relation is
// highest; `target_scores` holds that probability per sentence.
OneChoice aggregate_one(Tape& t, Var sentences, const std::vector<double>& target_scores);

Var classify_logits(Tape& t, Var bag_vector, Var cls_w, Var cls_b);
// softmax(W z + b), a distribution over all relations.
Var classify(Tape& t, Var bag_vector, Var cls_w, Var cls_b);

struct EvalScores {
  std::vector<double> probability;         // per relation, relation-conditioned
  std::vector<std::vector<double>> beta;   // per relation attention rows (att mode)
};

// Test-time scoring: with att, each relation queries the bag with its own
// embedding and keeps its own probability; with ave a single classification
// serves every relation; with one each relation takes its best sentence.
EvalScores score_bag_eval(Tape& t, Var sentences, Var att_diag, Var relation_emb, Var cls_w,
                          Var cls_b, Mode mode);

}  // namespace gbre::agg
