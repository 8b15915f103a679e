#include "gbre/kernels.hpp"

namespace gbre::kernels::serial {

void matmul_nn(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int l = 0; l < k; ++l) acc += a[i * k + l] * b[l * n + j];
      if (accumulate) {
        c[i * n + j] += acc;
      } else {
        c[i * n + j] = acc;
      }
    }
  }
}

void matmul_nt(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int l = 0; l < k; ++l) acc += a[i * k + l] * b[j * k + l];
      if (accumulate) {
        c[i * n + j] += acc;
      } else {
        c[i * n + j] = acc;
      }
    }
  }
}

void matmul_tn(int m, int k, int n, const double* a, const double* b, double* c, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int l = 0; l < k; ++l) acc += a[l * m + i] * b[l * n + j];
      if (accumulate) {
        c[i * n + j] += acc;
      } else {
        c[i * n + j] = acc;
      }
    }
  }
}

void conv1d_same(int L, int D, int c, int w, const double* x, const double* k,
                 const double* bias, double* out) {
  const int half = w / 2;
  for (int i = 0; i < c; ++i) {
    const double* ki = k + static_cast<std::size_t>(i) * w * D;
    for (int p = 0; p < L; ++p) {
      double acc = bias[i];
      for (int j = 0; j < w; ++j) {
        const int row = p + j - half;
        if (row < 0 || row >= L) continue;  // zero padding
        const double* xr = x + static_cast<std::size_t>(row) * D;
        const double* kj = ki + static_cast<std::size_t>(j) * D;
        for (int d = 0; d < D; ++d) acc += kj[d] * xr[d];
      }
      out[i * L + p] = acc;
    }
  }
}

void conv1d_same_grad_input(int L, int D, int c, int w, const double* dout,
                            const double* k, double* dx) {
  const int half = w / 2;
  for (int row = 0; row < L; ++row) {
    double* dxr = dx + static_cast<std::size_t>(row) * D;
    for (int i = 0; i < c; ++i) {
      const double* ki = k + static_cast<std::size_t>(i) * w * D;
      for (int j = 0; j < w; ++j) {
        const int p = row - j + half;  // output position that read this row via tap j
        if (p < 0 || p >= L) continue;
        const double g = dout[i * L + p];
        const double* kj = ki + static_cast<std::size_t>(j) * D;
        for (int d = 0; d < D; ++d) dxr[d] += g * kj[d];
      }
    }
  }
}

void conv1d_same_grad_kernel(int L, int D, int c, int w, const double* dout,
                             const double* x, double* dk, double* dbias) {
  const int half = w / 2;
  for (int i = 0; i < c; ++i) {
    double* dki = dk + static_cast<std::size_t>(i) * w * D;
    double bacc = 0.0;
    for (int p = 0; p < L; ++p) {
      const double g = dout[i * L + p];
      bacc += g;
      for (int j = 0; j < w; ++j) {
        const int row = p + j - half;
        if (row < 0 || row >= L) continue;
        const double* xr = x + static_cast<std::size_t>(row) * D;
        double* dkj = dki + static_cast<std::size_t>(j) * D;
        for (int d = 0; d < D; ++d) dkj[d] += g * xr[d];
      }
    }
    dbias[i] += bacc;
  }
}

}  // namespace gbre::kernels::serial
