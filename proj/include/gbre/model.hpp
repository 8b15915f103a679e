#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gbre/aggregation.hpp"
#include "gbre/autodiff.hpp"
#include "gbre/corpus.hpp"
#include "gbre/gradcheck.hpp"
#include "gbre/rng.hpp"

namespace gbre {

// Architecture switches and dimensions shared by training and evaluation;
// persisted inside checkpoints.
struct ModelConfig {
  int word_dim = 200;
  int pos_dim = 5;
  int hidden = 230;  // convolution kernels
  int window = 3;
  int max_len = 120;
  int num_relations = 0;
  bool qs_att = true;
  bool bag_att = true;
  agg::Mode aggregation = agg::Mode::att;
  double bag_dropout = 0.3;
  double cls_dropout = 0.5;
  bool freeze_embeddings = false;

  int qs_output_width() const { return 3 * word_dim; }
  int sentence_width() const { return (qs_att ? 3 * word_dim : word_dim) + 2 * pos_dim; }
  int encoder_output_width() const { return 3 * hidden; }
};

struct ModelParams {
  ModelConfig config;
  std::uint64_t vocab_hash = 0;

  Param embeddings;      // V x d_w, PAD row pinned to zero
  Param w_h;             // 3 d_w
  Param pos_head_table;  // (2 max_len + 1) x d_p
  Param pos_tail_table;
  Param conv_kernels;  // c x (window * sentence_width)
  Param conv_bias;     // c
  Param att_diag;      // 3c, diagonal of the attention bilinear form
  Param rel_emb;       // R x 3c
  Param cls_w;         // R x 3c
  Param cls_b;         // R

  std::vector<Param*> all();
  std::vector<const Param*> all() const;
};

// Xavier-style init: every weight matrix uniform in +-sqrt(6/(rows+cols)),
// biases zero, att_diag identity, embeddings copied from the table.
ModelParams init_params(const ModelConfig& config, const EmbeddingTable& table,
                        std::uint64_t seed);

struct BagForward {
  Var sentence_matrix = nullptr;  // N x 3c encoder outputs
  Var updated = nullptr;          // after bag self-attention (same node when off)
  Var bag_alpha = nullptr;        // N x N, null when bag_att off
  Var beta = nullptr;             // selective attention weights, null for one/ave
  Var bag_vector = nullptr;       // aggregated z
  Var loss = nullptr;             // scalar -log P(gold)
  int chosen = -1;                // aggregate_one pick
};

// Encoder over every instance of the bag; rows are sentence vectors.
Var encode_bag_sentences(Tape& t, ModelParams& params, const EncodedBag& bag);

// Training-path loss for one bag against its gold label. `train` enables
// dropout from `rng`; gradient checks and evaluation run with train=false.
BagForward bag_loss(Tape& t, ModelParams& params, const EncodedBag& bag, bool train, Rng* rng);

struct BagScores {
  std::vector<double> probability;        // per relation
  std::vector<std::vector<double>> beta;  // per relation (att mode)
  std::vector<std::vector<double>> alpha; // bag self-attention rows
};
BagScores score_bag(const ModelParams& params, const EncodedBag& bag);

// Spec-level gradient oracle: mean bag loss over `bags` vs central finite
// differences for every parameter. Dropout is off inside the check.
GradCheckReport finite_difference_check(ModelParams& params, const std::vector<EncodedBag>& bags,
                                        double step, double tol);

}  // namespace gbre
