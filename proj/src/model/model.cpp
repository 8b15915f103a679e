#include "gbre/model.hpp"

#include <algorithm>
#include <cmath>

#include "gbre/bag_graph.hpp"
#include "gbre/errors.hpp"
#include "gbre/pcnn_encoder.hpp"
#include "gbre/qs_attention.hpp"

namespace gbre {

std::vector<Param*> ModelParams::all() {
  return {&embeddings, &w_h,      &pos_head_table, &pos_tail_table, &conv_kernels,
          &conv_bias,  &att_diag, &rel_emb,        &cls_w,          &cls_b};
}

std::vector<const Param*> ModelParams::all() const {
  return {&embeddings, &w_h,      &pos_head_table, &pos_tail_table, &conv_kernels,
          &conv_bias,  &att_diag, &rel_emb,        &cls_w,          &cls_b};
}

namespace {

// Symmetric fan-based draw: uniform in +-sqrt(6/(fan_in+fan_out)), which has
// variance 2/(fan_in+fan_out). Rank-1 shapes count as a single output unit.
Tensor xavier(std::vector<int> shape, Rng& rng) {
  const int fan_out = shape[0];
  const int fan_in = shape.size() > 1 ? shape[1] : 1;
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  Tensor t(std::move(shape));
  for (double& v : t.values) v = rng.uniform(-limit, limit);
  return t;
}

}  // namespace

ModelParams init_params(const ModelConfig& config, const EmbeddingTable& table,
                        std::uint64_t seed) {
  if (config.num_relations < 2)
    throw DataError("init_params: relation schema must have at least NA and one relation");
  if (table.dim != config.word_dim)
    throw DataError("init_params: embeddings are " + std::to_string(table.dim) +
                    "-dimensional but config expects " + std::to_string(config.word_dim));
  Rng rng(seed);
  ModelParams p;
  p.config = config;
  p.vocab_hash = table.vocab_hash();

  p.embeddings = Param(table.matrix, "embeddings", !config.freeze_embeddings);
  p.w_h = Param(xavier({3 * config.word_dim}, rng), "w_h");

  const int pos_rows = 2 * config.max_len + 1;
  p.pos_head_table = Param(xavier({pos_rows, config.pos_dim}, rng), "pos_head_table");
  p.pos_tail_table = Param(xavier({pos_rows, config.pos_dim}, rng), "pos_tail_table");

  const int in_width = config.window * config.sentence_width();
  p.conv_kernels = Param(xavier({config.hidden, in_width}, rng), "conv_kernels");
  p.conv_bias = Param(Tensor({config.hidden}), "conv_bias");

  const int enc = config.encoder_output_width();
  Tensor diag({enc});
  diag.fill(1.0);
  p.att_diag = Param(std::move(diag), "att_diag");
  p.rel_emb = Param(xavier({config.num_relations, enc}, rng), "rel_emb");
  p.cls_w = Param(xavier({config.num_relations, enc}, rng), "cls_w");
  p.cls_b = Param(Tensor({config.num_relations}), "cls_b");
  return p;
}

Var encode_bag_sentences(Tape& t, ModelParams& params, const EncodedBag& bag) {
  const ModelConfig& cfg = params.config;
  Var emb = t.param(params.embeddings);
  std::vector<Var> sentence_vectors;
  sentence_vectors.reserve(bag.instances.size());

  Var query = nullptr;
  if (cfg.qs_att) query = ops::gather_rows(t, emb, bag.query_ids);

  for (const EncodedInstance& inst : bag.instances) {
    const std::vector<int> ids(inst.ids.begin(), inst.ids.begin() + inst.length);
    Var words = ops::gather_rows(t, emb, ids);
    Var sent = words;
    if (cfg.qs_att)
      sent = qs::query_aware(t, words, query, t.param(params.w_h), {}, {}).fused;

    // segmentation follows text order; head/tail identity stays with the
    // position features
    const int k_first = std::min(inst.k_head, inst.k_tail);
    const int k_second = std::max(inst.k_head, inst.k_tail);
    sentence_vectors.push_back(pcnn::encode_sentence(
        t, sent, inst.pos_head, inst.pos_tail, k_first, k_second,
        t.param(params.pos_head_table), t.param(params.pos_tail_table),
        t.param(params.conv_kernels), t.param(params.conv_bias), cfg.window));
  }
  return ops::stack_rows(t, sentence_vectors);
}

BagForward bag_loss(Tape& t, ModelParams& params, const EncodedBag& bag, bool train, Rng* rng) {
  const ModelConfig& cfg = params.config;
  if (bag.label < 0 || bag.label >= cfg.num_relations)
    throw DataError("bag_loss: bag " + bag.key + " has no usable label");

  BagForward out;
  out.sentence_matrix = encode_bag_sentences(t, params, bag);
  out.updated = out.sentence_matrix;
  if (cfg.bag_att) {
    bag::GraphOutput g =
        bag::self_attention(t, out.sentence_matrix, train ? cfg.bag_dropout : 0.0, rng);
    out.updated = g.updated;
    out.bag_alpha = g.alpha;
  }

  Var z = nullptr;
  switch (cfg.aggregation) {
    case agg::Mode::att: {
      agg::SelectiveAttention att = agg::selective_attention(
          t, out.updated, t.param(params.att_diag), ops::row(t, t.param(params.rel_emb), bag.label));
      z = att.bag_vector;
      out.beta = att.beta;
      break;
    }
    case agg::Mode::ave:
      z = agg::aggregate_ave(t, out.updated);
      break;
    case agg::Mode::one: {
      // selection score: gold-relation probability of each sentence alone;
      // the discrete pick happens off the training tape
      std::vector<double> scores;
      const int n = out.updated->value.shape[0];
      Tape probe;
      Var rows = probe.constant(out.updated->value);
      Var pw = probe.param(params.cls_w);
      Var pb = probe.param(params.cls_b);
      for (int i = 0; i < n; ++i) {
        Var probs = agg::classify(probe, ops::row(probe, rows, i), pw, pb);
        scores.push_back(probs->value.at(bag.label));
      }
      agg::OneChoice choice = agg::aggregate_one(t, out.updated, scores);
      z = choice.bag_vector;
      out.chosen = choice.chosen;
      break;
    }
  }

  out.bag_vector = z;
  if (train && cfg.cls_dropout > 0.0) {
    if (!rng) throw NumericError("bag_loss: classifier dropout requires a random stream");
    z = ops::dropout(t, z, cfg.cls_dropout, *rng);
  }
  Var logits = agg::classify_logits(t, z, t.param(params.cls_w), t.param(params.cls_b));
  Var log_probs = ops::log_softmax_vec(t, logits);
  out.loss = ops::neg(t, ops::pick(t, log_probs, bag.label));
  return out;
}

BagScores score_bag(const ModelParams& params, const EncodedBag& bag) {
  // read-only evaluation pass on a private tape
  ModelParams& mutable_params = const_cast<ModelParams&>(params);
  Tape t;
  Var sentences = encode_bag_sentences(t, mutable_params, bag);
  BagScores out;
  if (params.config.bag_att) {
    bag::GraphOutput g = bag::self_attention(t, sentences, 0.0, nullptr);
    sentences = g.updated;
    const int n = g.alpha->value.shape[0];
    out.alpha.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double* row = g.alpha->value.data() + static_cast<std::size_t>(i) * n;
      out.alpha[static_cast<std::size_t>(i)].assign(row, row + n);
    }
  }
  agg::EvalScores scores = agg::score_bag_eval(
      t, sentences, t.param(mutable_params.att_diag), t.param(mutable_params.rel_emb),
      t.param(mutable_params.cls_w), t.param(mutable_params.cls_b), params.config.aggregation);
  out.probability = std::move(scores.probability);
  out.beta = std::move(scores.beta);
  return out;
}

GradCheckReport finite_difference_check(ModelParams& params, const std::vector<EncodedBag>& bags,
                                        double step, double tol) {
  if (bags.empty()) throw DataError("finite_difference_check: no bags");
  auto loss_fn = [&params, &bags](Tape& t) -> Var {
    std::vector<Var> losses;
    losses.reserve(bags.size());
    for (const EncodedBag& bag : bags)
      losses.push_back(bag_loss(t, params, bag, /*train=*/false, nullptr).loss);
    return ops::mean_stack(t, losses);
  };
  return gbre::finite_difference_check(loss_fn, params.all(), step, tol);
}

}  // namespace gbre
