#pragma once

#include <vector>

#include "gbre/autodiff.hpp"
#include "gbre/rng.hpp"

namespace gbre::ops {

// Dense op inventory for the pipeline. Every op validates operand shapes
// (ShapeError names the op and both shapes), records itself on the tape and
// has an exact reverse rule. All matrices are row-major rank-2 tensors,
// vectors rank-1.

// out[i] = table[ids[i]], table is V x d. Gradient scatters back by row.
Var gather_rows(Tape& t, Var table, const std::vector<int>& ids);

Var matmul(Tape& t, Var a, Var b);     // (m x k)(k x n)
Var matmul_nt(Tape& t, Var a, Var b);  // (m x k)(n x k)^T -> m x n
Var matvec(Tape& t, Var a, Var x);     // (m x k)(k) -> m
Var vecmat(Tape& t, Var x, Var a);     // (m)(m x n) -> n

Var add(Tape& t, Var a, Var b);  // same shape
Var mul(Tape& t, Var a, Var b);  // elementwise, same shape
Var scale(Tape& t, Var a, double c);
Var neg(Tape& t, Var a);

// m x n plus a length-m vector broadcast across columns.
Var add_col_broadcast(Tape& t, Var m, Var v);
// m x n plus a length-n vector broadcast across rows.
Var add_row_broadcast(Tape& t, Var m, Var v);
// m x n times a length-n vector broadcast across rows (scales columns).
Var mul_row_broadcast(Tape& t, Var m, Var v);

// Concatenate along the last axis; all parts share the leading extent.
Var concat_cols(Tape& t, const std::vector<Var>& parts);
// Columns [begin, begin+len) of a matrix, or a span of a vector.
Var slice_cols(Tape& t, Var a, int begin, int len);
// Stack rank-1 vectors of equal length into an N x d matrix.
Var stack_rows(Tape& t, const std::vector<Var>& rows);
Var row(Tape& t, Var m, int r);  // one row of a matrix as a vector

Var reshape(Tape& t, Var a, std::vector<int> shape);
Var tile_rows(Tape& t, Var v, int n);  // vector d -> n x d
Var mean_rows(Tape& t, Var m);         // N x d -> d

Var relu(Tape& t, Var a);
Var log_elem(Tape& t, Var a);
Var softmax_rows(Tape& t, Var a);     // rank-1 treated as a single row
Var log_softmax_vec(Tape& t, Var v);  // numerically stable log softmax
Var sum(Tape& t, Var a);              // all elements -> scalar
Var pick(Tape& t, Var v, int i);      // element of a vector -> scalar
Var mean_stack(Tape& t, const std::vector<Var>& scalars);

// Max over the last axis per row; ties take the lowest index.
Var row_max(Tape& t, Var a);
// Segment maxima per row of an m x L matrix over [0,cut1), [cut1,cut2),
// [cut2,L); requires 1 <= cut1 <= cut2 <= L. An empty segment yields 0 and
// passes no gradient. Output m x 3.
Var piecewise_max(Tape& t, Var a, int cut1, int cut2);

// Cosine similarity of two equal-length vectors. A zero-norm operand makes
// the score 0 with zero gradient; identical operands score exactly 1.
Var cosine(Tape& t, Var u, Var v);
// N x N matrix of pairwise row cosines; diagonal is exactly 1 for nonzero
// rows, 0 for zero rows.
Var cosine_matrix(Tape& t, Var b);

// Same-length centered convolution over rows of X[L x D] with kernels
// K[c x (w*D)] and bias[c]; odd window required. Output c x L.
Var conv1d_same(Tape& t, Var x, Var kernels, Var bias, int window);

// Inverted dropout: keeps an element with probability 1-rate and scales it
// by 1/(1-rate). rate==0 is the identity; the mask comes from the caller's
// seeded stream so evaluation simply passes rate 0.
Var dropout(Tape& t, Var a, double rate, Rng& rng);

}  // namespace gbre::ops
