// Times the serial reference kernels against the OpenMP variants on
// pipeline-shaped workloads and checks they agree bitwise.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "gbre/kernels.hpp"
#include "gbre/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> random_vec(std::size_t n, gbre::Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  const auto start = Clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a == b;
}

void bench_matmul(int m, int k, int n, int reps, gbre::Rng& rng) {
  const auto a = random_vec(static_cast<std::size_t>(m) * k, rng);
  const auto b = random_vec(static_cast<std::size_t>(k) * n, rng);
  std::vector<double> c_serial(static_cast<std::size_t>(m) * n);
  std::vector<double> c_omp(c_serial.size());

  const double ts = time_ms(
      [&] { gbre::kernels::serial::matmul_nn(m, k, n, a.data(), b.data(), c_serial.data(), false); },
      reps);
  const double tp = time_ms(
      [&] { gbre::kernels::openmp::matmul_nn(m, k, n, a.data(), b.data(), c_omp.data(), false); },
      reps);
  const double gflops = 2.0 * m * k * n / 1e6;  // per ms
  std::printf("matmul %4dx%4dx%4d  serial %8.3f ms (%6.2f GFLOP/s)  openmp %8.3f ms (%6.2f GFLOP/s)  speedup %.2fx  %s\n",
              m, k, n, ts, gflops / ts, tp, gflops / tp, ts / tp,
              bitwise_equal(c_serial, c_omp) ? "bitwise-equal" : "MISMATCH");
}

void bench_conv(int L, int D, int c, int w, int reps, gbre::Rng& rng) {
  const auto x = random_vec(static_cast<std::size_t>(L) * D, rng);
  const auto k = random_vec(static_cast<std::size_t>(c) * w * D, rng);
  const auto bias = random_vec(static_cast<std::size_t>(c), rng);
  std::vector<double> m_serial(static_cast<std::size_t>(c) * L);
  std::vector<double> m_omp(m_serial.size());

  const double ts = time_ms(
      [&] {
        gbre::kernels::serial::conv1d_same(L, D, c, w, x.data(), k.data(), bias.data(),
                                           m_serial.data());
      },
      reps);
  const double tp = time_ms(
      [&] {
        gbre::kernels::openmp::conv1d_same(L, D, c, w, x.data(), k.data(), bias.data(),
                                           m_omp.data());
      },
      reps);
  const double gflops = 2.0 * L * D * c * w / 1e6;
  std::printf("conv   L=%3d D=%4d c=%3d w=%d  serial %8.3f ms (%6.2f GFLOP/s)  openmp %8.3f ms (%6.2f GFLOP/s)  speedup %.2fx  %s\n",
              L, D, c, w, ts, gflops / ts, tp, gflops / tp, ts / tp,
              bitwise_equal(m_serial, m_omp) ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("OpenMP compiled: %s, max threads: %d\n",
              gbre::kernels::openmp_compiled() ? "yes" : "no", gbre::kernels::max_threads());
  gbre::Rng rng(7);

  bench_matmul(64, 64, 64, 50, rng);
  bench_matmul(256, 256, 256, 10, rng);
  bench_matmul(512, 512, 512, 3, rng);

  // sentence-encoder shapes: L tokens, fused width 3*d_w + 2*d_p
  bench_conv(40, 56, 32, 3, 200, rng);     // synthetic preset
  bench_conv(120, 610, 230, 3, 5, rng);    // biorel/tbga preset
  return 0;
}
