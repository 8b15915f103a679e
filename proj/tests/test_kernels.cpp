#include <doctest.h>

#include <tuple>
#include <vector>

#include "gbre/kernels.hpp"
#include "gbre/rng.hpp"

using namespace gbre;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// direct triple loop, independent of the kernel code paths
std::vector<double> naive_matmul(int m, int k, int n, const std::vector<double>& a,
                                 const std::vector<double>& b) {
  std::vector<double> c(static_cast<std::size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i)
    for (int l = 0; l < k; ++l)
      for (int j = 0; j < n; ++j) c[i * n + j] += a[i * k + l] * b[l * n + j];
  return c;
}

}  // namespace

TEST_CASE("matmul_nn matches a naive oracle") {
  Rng rng(11);
  for (auto [m, k, n] : {std::tuple{1, 1, 1}, {3, 4, 5}, {17, 9, 23}}) {
    const auto a = random_vec(static_cast<std::size_t>(m) * k, rng);
    const auto b = random_vec(static_cast<std::size_t>(k) * n, rng);
    std::vector<double> c(static_cast<std::size_t>(m) * n);
    kernels::serial::matmul_nn(m, k, n, a.data(), b.data(), c.data(), false);
    const auto expect = naive_matmul(m, k, n, a, b);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("transposed variants agree with explicit transposition") {
  Rng rng(12);
  const int m = 5, k = 7, n = 4;
  const auto a = random_vec(static_cast<std::size_t>(m) * k, rng);
  const auto b = random_vec(static_cast<std::size_t>(n) * k, rng);
  // matmul_nt: A (m x k) times B^T where B is n x k
  std::vector<double> bt(static_cast<std::size_t>(k) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) bt[j * n + i] = b[i * k + j];
  std::vector<double> got(static_cast<std::size_t>(m) * n);
  kernels::serial::matmul_nt(m, k, n, a.data(), b.data(), got.data(), false);
  const auto expect = naive_matmul(m, k, n, a, bt);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expect[i]));

  // matmul_tn: A^T (m x k) from A stored k x m
  const auto a2 = random_vec(static_cast<std::size_t>(k) * m, rng);
  const auto b2 = random_vec(static_cast<std::size_t>(k) * n, rng);
  std::vector<double> a2t(static_cast<std::size_t>(m) * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j) a2t[j * k + i] = a2[i * m + j];
  std::vector<double> got2(static_cast<std::size_t>(m) * n);
  kernels::serial::matmul_tn(m, k, n, a2.data(), b2.data(), got2.data(), false);
  const auto expect2 = naive_matmul(m, k, n, a2t, b2);
  for (std::size_t i = 0; i < got2.size(); ++i) CHECK(got2[i] == doctest::Approx(expect2[i]));
}

TEST_CASE("openmp kernels are bitwise identical to the serial reference") {
  Rng rng(13);
  for (auto [m, k, n] : {std::tuple{2, 3, 2}, {31, 17, 29}, {128, 64, 128}}) {
    const auto a = random_vec(static_cast<std::size_t>(m) * k, rng);
    const auto b1 = random_vec(static_cast<std::size_t>(k) * n, rng);
    std::vector<double> cs(static_cast<std::size_t>(m) * n), cp(cs.size());
    kernels::serial::matmul_nn(m, k, n, a.data(), b1.data(), cs.data(), false);
    kernels::openmp::matmul_nn(m, k, n, a.data(), b1.data(), cp.data(), false);
    CHECK(cs == cp);

    const auto b2 = random_vec(static_cast<std::size_t>(n) * k, rng);
    kernels::serial::matmul_nt(m, k, n, a.data(), b2.data(), cs.data(), false);
    kernels::openmp::matmul_nt(m, k, n, a.data(), b2.data(), cp.data(), false);
    CHECK(cs == cp);
  }

  const int L = 23, D = 14, c = 9, w = 3;
  const auto x = random_vec(static_cast<std::size_t>(L) * D, rng);
  const auto k = random_vec(static_cast<std::size_t>(c) * w * D, rng);
  const auto bias = random_vec(c, rng);
  std::vector<double> ms(static_cast<std::size_t>(c) * L), mp(ms.size());
  kernels::serial::conv1d_same(L, D, c, w, x.data(), k.data(), bias.data(), ms.data());
  kernels::openmp::conv1d_same(L, D, c, w, x.data(), k.data(), bias.data(), mp.data());
  CHECK(ms == mp);

  const auto dout = random_vec(static_cast<std::size_t>(c) * L, rng);
  std::vector<double> dxs(static_cast<std::size_t>(L) * D, 0.0), dxp(dxs);
  kernels::serial::conv1d_same_grad_input(L, D, c, w, dout.data(), k.data(), dxs.data());
  kernels::openmp::conv1d_same_grad_input(L, D, c, w, dout.data(), k.data(), dxp.data());
  CHECK(dxs == dxp);

  std::vector<double> dks(k.size(), 0.0), dkp(dks), dbs(c, 0.0), dbp(dbs);
  kernels::serial::conv1d_same_grad_kernel(L, D, c, w, dout.data(), x.data(), dks.data(), dbs.data());
  kernels::openmp::conv1d_same_grad_kernel(L, D, c, w, dout.data(), x.data(), dkp.data(), dbp.data());
  CHECK(dks == dkp);
  CHECK(dbs == dbp);
}

TEST_CASE("dispatch honors the backend switch across the size cutoff") {
  const auto saved = kernels::backend();
  Rng rng(14);
  // large enough to cross kParallelFlopCutoff
  const int m = 64, k = 64, n = 64;
  const auto a = random_vec(static_cast<std::size_t>(m) * k, rng);
  const auto b = random_vec(static_cast<std::size_t>(k) * n, rng);
  std::vector<double> serial_out(static_cast<std::size_t>(m) * n), omp_out(serial_out.size());
  kernels::set_backend(kernels::Backend::serial);
  kernels::matmul_nn(m, k, n, a.data(), b.data(), serial_out.data(), false);
  kernels::set_backend(kernels::Backend::openmp);
  kernels::matmul_nn(m, k, n, a.data(), b.data(), omp_out.data(), false);
  CHECK(serial_out == omp_out);
  kernels::set_backend(saved);
}

TEST_CASE("conv1d_same centered window against a sliding dot-product oracle") {
  // L=4, D=2, one kernel, window 3: out[p] = bias + sum over rows p-1..p+1
  const std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8};      // rows (1,2) (3,4) (5,6) (7,8)
  const std::vector<double> k = {0.5, -1, 2, 0.25, -0.5, 1};   // taps for rows p-1, p, p+1
  const std::vector<double> bias = {0.125};
  std::vector<double> out(4);
  kernels::serial::conv1d_same(4, 2, 1, 3, x.data(), k.data(), bias.data(), out.data());
  for (int p = 0; p < 4; ++p) {
    double expect = 0.125;
    for (int j = 0; j < 3; ++j) {
      const int row = p + j - 1;
      if (row < 0 || row >= 4) continue;
      expect += k[2 * j] * x[2 * row] + k[2 * j + 1] * x[2 * row + 1];
    }
    CHECK(out[p] == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("accumulate flag adds instead of overwriting") {
  const std::vector<double> a = {1, 2}, b = {3, 4};
  std::vector<double> c = {10};
  kernels::serial::matmul_nn(1, 2, 1, a.data(), b.data(), c.data(), true);
  CHECK(c[0] == doctest::Approx(10 + 3 + 8));
}
