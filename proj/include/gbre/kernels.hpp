#pragma once

#include <cstddef>

namespace gbre::kernels {

// The dense inner loops of the pipeline (matrix products and the sentence
// convolution) exist in two variants: a serial reference and an OpenMP
// version parallelized over independent output rows. Both accumulate each
// output element in the same order, so results are bit-identical; the serial
// variant stays as the test oracle and the benchmark baseline.
enum class Backend { serial, openmp };

Backend backend();
void set_backend(Backend b);
bool openmp_compiled();
int max_threads();

// Below this many multiply-adds a kernel always runs serially; forking
// threads costs more than the loop at desk-scale sizes.
inline constexpr long kParallelFlopCutoff = 1 << 16;

// C[m x n] = A[m x k] * B[k x n], adding into C when accumulate is set.
void matmul_nn(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate);
// C[m x n] = A[m x k] * B[n x k]^T
void matmul_nt(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate);
// C[m x n] = A[k x m]^T * B[k x n]
void matmul_tn(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate);

// Same-length 1-D convolution over the rows of X[L x D] with an odd window w
// centered on each position, zero padding at the borders. K is [c x (w*D)],
// out is [c x L]; out[i][p] = bias[i] + sum_j sum_d K[i][j*D+d] * X[p+j-w/2][d].
void conv1d_same(int L, int D, int c, int w, const double* x, const double* k,
                 const double* bias, double* out);
// dX[L x D] += gradient of conv1d_same w.r.t. X given dOut[c x L].
void conv1d_same_grad_input(int L, int D, int c, int w, const double* dout,
                            const double* k, double* dx);
// dK[c x (w*D)] += and dBias[c] += gradients w.r.t. kernel and bias.
void conv1d_same_grad_kernel(int L, int D, int c, int w, const double* dout,
                             const double* x, double* dk, double* dbias);

namespace serial {
void matmul_nn(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate);
void matmul_nt(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate);
void matmul_tn(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate);
void conv1d_same(int L, int D, int c, int w, const double* x, const double* k,
                 const double* bias, double* out);
void conv1d_same_grad_input(int L, int D, int c, int w, const double* dout,
                            const double* k, double* dx);
void conv1d_same_grad_kernel(int L, int D, int c, int w, const double* dout,
                             const double* x, double* dk, double* dbias);
}  // namespace serial

namespace openmp {
void matmul_nn(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate);
void matmul_nt(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate);
void matmul_tn(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate);
void conv1d_same(int L, int D, int c, int w, const double* x, const double* k,
                 const double* bias, double* out);
void conv1d_same_grad_input(int L, int D, int c, int w, const double* dout,
                            const double* k, double* dx);
void conv1d_same_grad_kernel(int L, int D, int c, int w, const double* dout,
                             const double* x, double* dk, double* dbias);
}  // namespace openmp

}  // namespace gbre::kernels
