#include "gbre/kernels.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gbre::kernels {

namespace {
std::atomic<Backend> g_backend{
#ifdef _OPENMP
    Backend::openmp
#else
    Backend::serial
#endif
};

bool use_parallel(long flops) {
#ifdef _OPENMP
  return g_backend.load() == Backend::openmp && flops >= kParallelFlopCutoff;
#else
  (void)flops;
  return false;
#endif
}
}  // namespace

Backend backend() { return g_backend.load(); }
void set_backend(Backend b) { g_backend.store(b); }

bool openmp_compiled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void matmul_nn(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate) {
  if (use_parallel(static_cast<long>(m) * k * n)) {
    openmp::matmul_nn(m, k, n, a, b, c, accumulate);
  } else {
    serial::matmul_nn(m, k, n, a, b, c, accumulate);
  }
}

void matmul_nt(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate) {
  if (use_parallel(static_cast<long>(m) * k * n)) {
    openmp::matmul_nt(m, k, n, a, b, c, accumulate);
  } else {
    serial::matmul_nt(m, k, n, a, b, c, accumulate);
  }
}

void matmul_tn(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate) {
  if (use_parallel(static_cast<long>(m) * k * n)) {
    openmp::matmul_tn(m, k, n, a, b, c, accumulate);
  } else {
    serial::matmul_tn(m, k, n, a, b, c, accumulate);
  }
}

void conv1d_same(int L, int D, int c, int w, const double* x, const double* k,
                 const double* bias, double* out) {
  if (use_parallel(static_cast<long>(L) * D * c * w)) {
    openmp::conv1d_same(L, D, c, w, x, k, bias, out);
  } else {
    serial::conv1d_same(L, D, c, w, x, k, bias, out);
  }
}

void conv1d_same_grad_input(int L, int D, int c, int w, const double* dout,
                            const double* k, double* dx) {
  if (use_parallel(static_cast<long>(L) * D * c * w)) {
    openmp::conv1d_same_grad_input(L, D, c, w, dout, k, dx);
  } else {
    serial::conv1d_same_grad_input(L, D, c, w, dout, k, dx);
  }
}

void conv1d_same_grad_kernel(int L, int D, int c, int w, const double* dout,
                             const double* x, double* dk, double* dbias) {
  if (use_parallel(static_cast<long>(L) * D * c * w)) {
    openmp::conv1d_same_grad_kernel(L, D, c, w, dout, x, dk, dbias);
  } else {
    serial::conv1d_same_grad_kernel(L, D, c, w, dout, x, dk, dbias);
  }
}

}  // namespace gbre::kernels
