#include "gbre/bag_graph.hpp"

#include "gbre/errors.hpp"

namespace gbre::bag {

GraphOutput self_attention(Tape& t, Var sentences, double dropout_rate, Rng* rng) {
  Tape::ScopeGuard scope(t, "bag_graph");
  if (sentences->value.rank() != 2 || sentences->value.shape[0] < 1)
    throw ShapeError("bag_self_attention: expected nonempty N x d matrix, got " +
                     Tensor::shape_str(sentences->value.shape));
  Var scores = ops::cosine_matrix(t, sentences);
  Var alpha = ops::softmax_rows(t, scores);
  Var updated = ops::matmul(t, alpha, sentences);
  if (dropout_rate > 0.0) {
    if (!rng) throw NumericError("bag_self_attention: dropout requires a random stream");
    updated = ops::dropout(t, updated, dropout_rate, *rng);
  }
  return {updated, alpha};
}

}  // namespace gbre::bag
