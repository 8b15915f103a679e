#include <doctest.h>

#include <cmath>
#include <vector>

#include "gbre/gradcheck.hpp"
#include "gbre/pcnn_encoder.hpp"
#include "gbre/rng.hpp"

using namespace gbre;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.values) v = rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace

TEST_CASE("append_position_features") {
  Rng rng(1);
  const int L = 3, w = 4, dp = 2;
  const Tensor x = random_tensor({L, w}, rng);
  const Tensor head_table = random_tensor({9, dp}, rng);
  const Tensor tail_table = random_tensor({9, dp}, rng);
  const std::vector<int> off_head = {4, 5, 6};
  const std::vector<int> off_tail = {2, 3, 4};

  SUBCASE("zero tables append zeros") {
    Tape t;
    Var out = pcnn::append_position_features(t, t.constant(x), off_head, off_tail,
                                             t.constant(Tensor({9, dp})), t.constant(Tensor({9, dp})));
    CHECK(out->value.shape == std::vector<int>{L, w + 2 * dp});
    for (int l = 0; l < L; ++l)
      for (int j = w; j < w + 2 * dp; ++j) CHECK(out->value.at(l, j) == 0.0);
  }
  SUBCASE("manual concatenation oracle") {
    Tape t;
    Var out = pcnn::append_position_features(t, t.constant(x), off_head, off_tail,
                                             t.constant(head_table), t.constant(tail_table));
    for (int l = 0; l < L; ++l) {
      for (int j = 0; j < w; ++j) CHECK(out->value.at(l, j) == x.at(l, j));
      for (int j = 0; j < dp; ++j) {
        CHECK(out->value.at(l, w + j) == head_table.at(off_head[l], j));
        CHECK(out->value.at(l, w + dp + j) == tail_table.at(off_tail[l], j));
      }
    }
  }
  SUBCASE("offset outside the table range errors") {
    Tape t;
    CHECK_THROWS_AS(pcnn::append_position_features(t, t.constant(x), {4, 5, 40}, off_tail,
                                                   t.constant(head_table), t.constant(tail_table)),
                    ShapeError);
  }
}

TEST_CASE("convolve") {
  Rng rng(2);

  SUBCASE("zero kernel with bias gives a constant row") {
    Tape t;
    Var out = pcnn::convolve(t, t.constant(random_tensor({5, 3}, rng)),
                             t.constant(Tensor({2, 9})), t.constant(Tensor({2}, {1.5, -2})), 3);
    for (int p = 0; p < 5; ++p) {
      CHECK(out->value.at(0, p) == 1.5);
      CHECK(out->value.at(1, p) == -2.0);
    }
  }
  SUBCASE("single kernel against a sliding dot-product oracle") {
    const int L = 4, D = 2, w = 3;
    const Tensor x = random_tensor({L, D}, rng);
    const Tensor k = random_tensor({1, w * D}, rng);
    const Tensor b = random_tensor({1}, rng);
    Tape t;
    Var out = pcnn::convolve(t, t.constant(x), t.constant(k), t.constant(b), w);
    CHECK(out->value.shape == std::vector<int>{1, L});
    for (int p = 0; p < L; ++p) {
      double expect = b.at(0);
      for (int j = 0; j < w; ++j) {
        const int row = p + j - w / 2;
        if (row < 0 || row >= L) continue;
        for (int d = 0; d < D; ++d) expect += k.at(0, j * D + d) * x.at(row, d);
      }
      CHECK(out->value.at(0, p) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("even windows are rejected") {
    Tape t;
    CHECK_THROWS_AS(pcnn::convolve(t, t.constant(random_tensor({4, 2}, rng)),
                                   t.constant(random_tensor({1, 4}, rng)),
                                   t.constant(random_tensor({1}, rng)), 2),
                    ShapeError);
  }
}

TEST_CASE("piecewise_pool") {
  SUBCASE("segment maxima for the worked row") {
    // row (1,5,2,7,3,9), entities at 1-based positions 2 and 4
    Tape t;
    Var m = t.constant(Tensor({1, 6}, {1, 5, 2, 7, 3, 9}));
    Var out = pcnn::piecewise_pool(t, m, /*k_first=*/1, /*k_second=*/3);  // 0-based
    CHECK(out->value.values == std::vector<double>{5, 7, 9});
  }
  SUBCASE("constant row pools to the constant everywhere") {
    Tape t;
    Tensor row({1, 5});
    row.fill(3.25);
    Var out = pcnn::piecewise_pool(t, t.constant(row), 1, 3);
    CHECK(out->value.values == std::vector<double>{3.25, 3.25, 3.25});
  }
  SUBCASE("entity at the last position leaves an empty third segment") {
    Tape t;
    Var m = t.constant(Tensor({1, 4}, {4, 3, 2, 1}));
    Var out = pcnn::piecewise_pool(t, m, 1, 3);
    CHECK(out->value.values == std::vector<double>{4, 2, 0});
  }
  SUBCASE("exhaustive oracle over all lengths and positions") {
    Rng rng(3);
    for (int L = 1; L <= 8; ++L) {
      const Tensor m = random_tensor({2, L}, rng);
      for (int k1 = 0; k1 < L; ++k1)
        for (int k2 = k1; k2 < L; ++k2) {
          Tape t;
          Var out = pcnn::piecewise_pool(t, t.constant(m), k1, k2);
          for (int row = 0; row < 2; ++row) {
            const int begin[3] = {0, k1 + 1, k2 + 1};
            const int end[3] = {k1 + 1, k2 + 1, L};
            for (int s = 0; s < 3; ++s) {
              double expect = 0.0;  // empty segment rule
              bool any = false;
              for (int j = begin[s]; j < end[s]; ++j) {
                expect = any ? std::max(expect, m.at(row, j)) : m.at(row, j);
                any = true;
              }
              CHECK(out->value.at(row, s) == expect);
            }
          }
        }
    }
  }
  SUBCASE("invalid positions are rejected") {
    Tape t;
    Var m = t.constant(Tensor({1, 4}, {1, 2, 3, 4}));
    CHECK_THROWS_AS(pcnn::piecewise_pool(t, m, 3, 1), ShapeError);
    CHECK_THROWS_AS(pcnn::piecewise_pool(t, m, 1, 9), ShapeError);
  }
}

TEST_CASE("encode_sentence") {
  Rng rng(4);
  const int L = 6, width = 5, dp = 2, c = 3, w = 3;
  const std::vector<int> off_head = {3, 4, 5, 6, 7, 8};
  const std::vector<int> off_tail = {1, 2, 3, 4, 5, 6};

  SUBCASE("zero input and parameters give a zero vector") {
    Tape t;
    Var out = pcnn::encode_sentence(t, t.constant(Tensor({L, width})), off_head, off_tail, 1, 4,
                                    t.constant(Tensor({13, dp})), t.constant(Tensor({13, dp})),
                                    t.constant(Tensor({c, w * (width + 2 * dp)})),
                                    t.constant(Tensor({c})), w);
    CHECK(out->value.shape == std::vector<int>{3 * c});
    for (double v : out->value.values) CHECK(v == 0.0);
  }
  SUBCASE("output width is 3c regardless of sentence length (690 at c=230)") {
    for (int len : {3, 9}) {
      Tape t;
      std::vector<int> offs(static_cast<std::size_t>(len), 1);
      Var out = pcnn::encode_sentence(t, t.constant(random_tensor({len, 4}, rng)), offs, offs, 0,
                                      1, t.constant(random_tensor({5, dp}, rng)),
                                      t.constant(random_tensor({5, dp}, rng)),
                                      t.constant(random_tensor({230, w * (4 + 2 * dp)}, rng)),
                                      t.constant(random_tensor({230}, rng)), w);
      CHECK(out->value.shape == std::vector<int>{690});
      for (double v : out->value.values) CHECK(v >= 0.0);  // post-ReLU
    }
  }
  SUBCASE("composition matches chaining the three stage oracles") {
    const Tensor x = random_tensor({L, width}, rng);
    const Tensor ht = random_tensor({13, dp}, rng);
    const Tensor tt = random_tensor({13, dp}, rng);
    const Tensor kern = random_tensor({c, w * (width + 2 * dp)}, rng);
    const Tensor bias = random_tensor({c}, rng);
    const int k1 = 1, k2 = 4;

    Tape t;
    Var full = pcnn::encode_sentence(t, t.constant(x), off_head, off_tail, k1, k2,
                                     t.constant(ht), t.constant(tt), t.constant(kern),
                                     t.constant(bias), w);

    // independent recomputation with plain loops
    const int D = width + 2 * dp;
    std::vector<std::vector<double>> xin(L, std::vector<double>(D));
    for (int l = 0; l < L; ++l) {
      for (int j = 0; j < width; ++j) xin[l][j] = x.at(l, j);
      for (int j = 0; j < dp; ++j) {
        xin[l][width + j] = ht.at(off_head[l], j);
        xin[l][width + dp + j] = tt.at(off_tail[l], j);
      }
    }
    for (int i = 0; i < c; ++i) {
      std::vector<double> conv(L);
      for (int p = 0; p < L; ++p) {
        double acc = bias.at(i);
        for (int j = 0; j < w; ++j) {
          const int row = p + j - w / 2;
          if (row < 0 || row >= L) continue;
          for (int d = 0; d < D; ++d) acc += kern.at(i, j * D + d) * xin[row][d];
        }
        conv[p] = acc;
      }
      const int begin[3] = {0, k1 + 1, k2 + 1};
      const int end[3] = {k1 + 1, k2 + 1, L};
      for (int s = 0; s < 3; ++s) {
        double mx = -1e300;
        for (int j = begin[s]; j < end[s]; ++j) mx = std::max(mx, conv[j]);
        if (begin[s] >= end[s]) mx = 0.0;
        const double expect = std::max(0.0, mx);
        CHECK(full->value.at(i * 3 + s) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("encoder parameters pass the finite-difference check") {
  Rng rng(5);
  const int L = 5, width = 3, dp = 2, c = 2, w = 3;
  Param x(random_tensor({L, width}, rng), "x");
  Param ht(random_tensor({11, dp}, rng), "pos_head");
  Param tt(random_tensor({11, dp}, rng), "pos_tail");
  Param kern(random_tensor({c, w * (width + 2 * dp)}, rng), "kernels");
  Param bias(random_tensor({c}, rng), "bias");
  const std::vector<int> offs = {2, 3, 4, 5, 6};

  auto loss = [&](Tape& t) {
    Var out = pcnn::encode_sentence(t, t.param(x), offs, offs, 1, 3, t.param(ht), t.param(tt),
                                    t.param(kern), t.param(bias), w);
    Rng wrng(77);
    Tensor cotangent(out->value.shape);
    for (double& v : cotangent.values) v = wrng.uniform(-1.0, 1.0);
    return ops::sum(t, ops::mul(t, out, t.constant(std::move(cotangent))));
  };
  const auto report = finite_difference_check(loss, {&x, &ht, &tt, &kern, &bias}, 1e-5, 1e-3);
  INFO(report.to_string());
  CHECK(report.passed);
}

TEST_CASE("permutations inside a max-dominated segment do not change the output") {
  // row (1,9,2 | 7,3 | 5): swapping the non-max entries of segment one keeps
  // every segment maximum; moving the 9 across the boundary changes them
  Tape t1;
  Var a = t1.constant(Tensor({1, 6}, {1, 9, 2, 7, 3, 5}));
  const auto base = pcnn::piecewise_pool(t1, a, 2, 4)->value.values;

  Tape t2;
  Var swapped = t2.constant(Tensor({1, 6}, {2, 9, 1, 7, 3, 5}));
  CHECK(pcnn::piecewise_pool(t2, swapped, 2, 4)->value.values == base);

  Tape t3;
  Var moved = t3.constant(Tensor({1, 6}, {1, 7, 2, 9, 3, 5}));
  CHECK(pcnn::piecewise_pool(t3, moved, 2, 4)->value.values != base);
}
