#include "gbre/pcnn_encoder.hpp"

#include "gbre/errors.hpp"

namespace gbre::pcnn {

namespace {
constexpr const char* kScope = "pcnn_encoder";
}

Var append_position_features(Tape& t, Var input, const std::vector<int>& off_head,
                             const std::vector<int>& off_tail, Var pos_head_table,
                             Var pos_tail_table) {
  Tape::ScopeGuard scope(t, kScope);
  const int rows = input->value.shape[0];
  if (static_cast<int>(off_head.size()) < rows || static_cast<int>(off_tail.size()) < rows)
    throw ShapeError("append_position_features: fewer offsets than sentence rows");
  const std::vector<int> head(off_head.begin(), off_head.begin() + rows);
  const std::vector<int> tail(off_tail.begin(), off_tail.begin() + rows);
  Var p_head = ops::gather_rows(t, pos_head_table, head);
  Var p_tail = ops::gather_rows(t, pos_tail_table, tail);
  return ops::concat_cols(t, {input, p_head, p_tail});
}

Var convolve(Tape& t, Var x, Var kernels, Var bias, int window) {
  Tape::ScopeGuard scope(t, kScope);
  return ops::conv1d_same(t, x, kernels, bias, window);
}

Var piecewise_pool(Tape& t, Var conv_out, int k_first, int k_second) {
  Tape::ScopeGuard scope(t, kScope);
  const int len = conv_out->value.shape[1];
  if (len < 1) throw ShapeError("piecewise_pool: empty conv output");
  if (!(0 <= k_first && k_first <= k_second && k_second < len))
    throw ShapeError("piecewise_pool: entity positions (" + std::to_string(k_first) + "," +
                     std::to_string(k_second) + ") invalid for length " + std::to_string(len));
  return ops::piecewise_max(t, conv_out, k_first + 1, k_second + 1);
}

Var encode_sentence(Tape& t, Var input, const std::vector<int>& off_head,
                    const std::vector<int>& off_tail, int k_first, int k_second,
                    Var pos_head_table, Var pos_tail_table, Var kernels, Var bias, int window) {
  Tape::ScopeGuard scope(t, kScope);
  Var x = append_position_features(t, input, off_head, off_tail, pos_head_table, pos_tail_table);
  Var m = convolve(t, x, kernels, bias, window);
  Var pooled = piecewise_pool(t, m, k_first, k_second);
  const int width = pooled->value.shape[0] * 3;
  return ops::relu(t, ops::reshape(t, pooled, {width}));
}

}  // namespace gbre::pcnn
