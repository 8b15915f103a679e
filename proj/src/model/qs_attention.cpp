#include "gbre/qs_attention.hpp"

#include <algorithm>

#include "gbre/errors.hpp"

namespace gbre::qs {

namespace {
constexpr double kMaskValue = -1e9;
constexpr const char* kScope = "qs_attention";
}  // namespace

Var similarity_matrix(Tape& t, Var sent, Var query, Var w_h) {
  Tape::ScopeGuard scope(t, kScope);
  const int d = sent->value.cols();
  if (query->value.cols() != d || w_h->value.size() != 3 * d)
    throw ShapeError("similarity_matrix: sentence " + Tensor::shape_str(sent->value.shape) +
                     ", query " + Tensor::shape_str(query->value.shape) +
                     " and weights " + Tensor::shape_str(w_h->value.shape) + " disagree on d_w");
  Var h_s = ops::slice_cols(t, w_h, 0, d);
  Var h_q = ops::slice_cols(t, w_h, d, d);
  Var h_sq = ops::slice_cols(t, w_h, 2 * d, d);
  // w_h.[s;q;s o q] split into a sentence term, a query term and a bilinear
  // term: (S h_s) 1^T + 1 (Q h_q)^T + (S o h_sq) Q^T
  Var sent_term = ops::matvec(t, sent, h_s);
  Var query_term = ops::matvec(t, query, h_q);
  Var bilinear = ops::matmul_nt(t, ops::mul_row_broadcast(t, sent, h_sq), query);
  return ops::add_col_broadcast(t, ops::add_row_broadcast(t, bilinear, query_term), sent_term);
}

Var apply_mask(Tape& t, Var h, const std::vector<char>& sent_valid,
               const std::vector<char>& query_valid) {
  Tape::ScopeGuard scope(t, kScope);
  const int rows = h->value.shape[0], cols = h->value.shape[1];
  if (!sent_valid.empty() && static_cast<int>(sent_valid.size()) != rows)
    throw ShapeError("apply_mask: sentence mask length mismatch");
  if (!query_valid.empty() && static_cast<int>(query_valid.size()) != cols)
    throw ShapeError("apply_mask: query mask length mismatch");
  if (!query_valid.empty() &&
      std::find(query_valid.begin(), query_valid.end(), 1) == query_valid.end())
    throw NumericError("apply_mask: query has no valid positions");
  const bool all_valid =
      (sent_valid.empty() || std::all_of(sent_valid.begin(), sent_valid.end(), [](char v) { return v; })) &&
      (query_valid.empty() || std::all_of(query_valid.begin(), query_valid.end(), [](char v) { return v; }));
  if (all_valid) return h;
  Tensor mask({rows, cols});
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const bool ok = (sent_valid.empty() || sent_valid[static_cast<std::size_t>(r)]) &&
                      (query_valid.empty() || query_valid[static_cast<std::size_t>(c)]);
      if (!ok) mask.at(r, c) = kMaskValue;
    }
  return ops::add(t, h, t.constant(std::move(mask), "pad_mask"));
}

SentenceToQuery s2q_attention(Tape& t, Var h_masked, Var query) {
  Tape::ScopeGuard scope(t, kScope);
  Var alpha = ops::softmax_rows(t, h_masked);
  return {ops::matmul(t, alpha, query), alpha};
}

QueryToSentence q2s_attention(Tape& t, Var h_masked, Var sent) {
  Tape::ScopeGuard scope(t, kScope);
  if (sent->value.shape[0] < 1) throw ShapeError("q2s_attention: empty sentence");
  Var col_max = ops::row_max(t, h_masked);          // max over query words per position
  Var weights = ops::softmax_rows(t, col_max);      // over sentence positions
  Var summary = ops::vecmat(t, weights, sent);
  return {ops::tile_rows(t, summary, sent->value.shape[0]), weights};
}

Var fuse(Tape& t, Var sent, Var s2q_fused, Var q2s_tiled, const std::vector<char>& sent_valid) {
  Tape::ScopeGuard scope(t, kScope);
  Var fused = ops::concat_cols(
      t, {sent, ops::mul(t, sent, s2q_fused), ops::mul(t, sent, q2s_tiled)});
  const bool all_valid =
      sent_valid.empty() || std::all_of(sent_valid.begin(), sent_valid.end(), [](char v) { return v; });
  if (all_valid) return fused;
  Tensor keep(fused->value.shape);
  for (int r = 0; r < fused->value.shape[0]; ++r) {
    const double v = sent_valid[static_cast<std::size_t>(r)] ? 1.0 : 0.0;
    for (int c = 0; c < fused->value.shape[1]; ++c) keep.at(r, c) = v;
  }
  return ops::mul(t, fused, t.constant(std::move(keep), "pad_zero"));
}

QueryAware query_aware(Tape& t, Var sent, Var query, Var w_h,
                       const std::vector<char>& sent_valid,
                       const std::vector<char>& query_valid) {
  Var h = similarity_matrix(t, sent, query, w_h);
  Var hm = apply_mask(t, h, sent_valid, query_valid);
  SentenceToQuery sq = s2q_attention(t, hm, query);
  QueryToSentence qs = q2s_attention(t, hm, sent);
  Var fused = fuse(t, sent, sq.fused, qs.tiled, sent_valid);
  return {fused, sq.alpha, qs.weights};
}

}  // namespace gbre::qs
