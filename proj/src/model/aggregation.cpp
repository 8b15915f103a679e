#include "gbre/aggregation.hpp"

#include <algorithm>

#include "gbre/errors.hpp"

namespace gbre::agg {

namespace {
constexpr const char* kScope = "aggregation";
}

Mode mode_from_string(const std::string& s) {
  if (s == "att") return Mode::att;
  if (s == "one") return Mode::one;
  if (s == "ave") return Mode::ave;
  throw UsageError("unknown aggregation mode: " + s + " (expected att, one or ave)");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::att: return "att";
    case Mode::one: return "one";
    case Mode::ave: return "ave";
  }
  return "att";
}

SelectiveAttention selective_attention(Tape& t, Var sentences, Var att_diag, Var relation_vec) {
  Tape::ScopeGuard scope(t, kScope);
  Var query = ops::mul(t, att_diag, relation_vec);   // diag(a) r
  Var scores = ops::matvec(t, sentences, query);     // c_i = s'_i diag(a) r
  Var beta = ops::softmax_rows(t, scores);
  return {ops::vecmat(t, beta, sentences), beta};
}

Var aggregate_ave(Tape& t, Var sentences) {
  Tape::ScopeGuard scope(t, kScope);
  return ops::mean_rows(t, sentences);
}

OneChoice aggregate_one(Tape& t, Var sentences, const std::vector<double>& target_scores) {
  Tape::ScopeGuard scope(t, kScope);
  const int n = sentences->value.shape[0];
  if (static_cast<int>(target_scores.size()) != n)
    throw ShapeError("aggregate_one: need one score per sentence");
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (target_scores[static_cast<std::size_t>(i)] > target_scores[static_cast<std::size_t>(best)])
      best = i;
  return {ops::row(t, sentences, best), best};
}

Var classify_logits(Tape& t, Var bag_vector, Var cls_w, Var cls_b) {
  Tape::ScopeGuard scope(t, kScope);
  return ops::add(t, ops::matvec(t, cls_w, bag_vector), cls_b);
}

Var classify(Tape& t, Var bag_vector, Var cls_w, Var cls_b) {
  Tape::ScopeGuard scope(t, kScope);
  return ops::softmax_rows(t, classify_logits(t, bag_vector, cls_w, cls_b));
}

EvalScores score_bag_eval(Tape& t, Var sentences, Var att_diag, Var relation_emb, Var cls_w,
                          Var cls_b, Mode mode) {
  Tape::ScopeGuard scope(t, kScope);
  const int n = sentences->value.shape[0];
  const int num_relations = relation_emb->value.shape[0];
  EvalScores out;
  out.probability.assign(static_cast<std::size_t>(num_relations), 0.0);

  if (mode == Mode::ave) {
    Var probs = classify(t, aggregate_ave(t, sentences), cls_w, cls_b);
    out.probability = probs->value.values;
    return out;
  }

  if (mode == Mode::one) {
    // probability of each relation under its own best sentence
    std::vector<const double*> rows;
    for (int i = 0; i < n; ++i) {
      Var probs = classify(t, ops::row(t, sentences, i), cls_w, cls_b);
      rows.push_back(probs->value.data());
    }
    for (int r = 0; r < num_relations; ++r) {
      double best = rows[0][r];
      for (int i = 1; i < n; ++i) best = std::max(best, rows[static_cast<std::size_t>(i)][r]);
      out.probability[static_cast<std::size_t>(r)] = best;
    }
    return out;
  }

  out.beta.resize(static_cast<std::size_t>(num_relations));
  for (int r = 0; r < num_relations; ++r) {
    SelectiveAttention att = selective_attention(t, sentences, att_diag, ops::row(t, relation_emb, r));
    Var probs = classify(t, att.bag_vector, cls_w, cls_b);
    out.probability[static_cast<std::size_t>(r)] = probs->value.at(r);
    out.beta[static_cast<std::size_t>(r)] = att.beta->value.values;
  }
  return out;
}

}  // namespace gbre::agg
