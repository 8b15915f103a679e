#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "gbre/aggregation.hpp"
#include "gbre/gradcheck.hpp"
#include "gbre/rng.hpp"

using namespace gbre;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.values) v = rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace

TEST_CASE("selective attention") {
  Rng rng(1);
  const int d = 4;

  SUBCASE("single sentence gets weight one") {
    Tape t;
    const Tensor s = random_tensor({1, d}, rng);
    const auto out = agg::selective_attention(t, t.constant(s), t.constant(random_tensor({d}, rng)),
                                              t.constant(random_tensor({d}, rng)));
    CHECK(out.beta->value.values == std::vector<double>{1.0});
    for (int k = 0; k < d; ++k) CHECK(out.bag_vector->value.at(k) == doctest::Approx(s.at(0, k)));
  }
  SUBCASE("zero bilinear weights give the uniform mean") {
    Tape t;
    const Tensor s = random_tensor({3, d}, rng);
    const auto out = agg::selective_attention(t, t.constant(s), t.constant(Tensor({d})),
                                              t.constant(random_tensor({d}, rng)));
    for (double b : out.beta->value.values) CHECK(b == doctest::Approx(1.0 / 3));
    for (int k = 0; k < d; ++k) {
      const double mean = (s.at(0, k) + s.at(1, k) + s.at(2, k)) / 3.0;
      CHECK(out.bag_vector->value.at(k) == doctest::Approx(mean));
    }
  }
  SUBCASE("three sentences against the brute-force oracle") {
    const Tensor s = random_tensor({3, d}, rng);
    const Tensor a = random_tensor({d}, rng);
    const Tensor r = random_tensor({d}, rng);
    Tape t;
    const auto out = agg::selective_attention(t, t.constant(s), t.constant(a), t.constant(r));
    std::vector<double> scores(3);
    for (int i = 0; i < 3; ++i) {
      double c = 0;
      for (int k = 0; k < d; ++k) c += s.at(i, k) * a.at(k) * r.at(k);
      scores[static_cast<std::size_t>(i)] = c;
    }
    double denom = 0;
    for (double c : scores) denom += std::exp(c);
    double beta_sum = 0;
    for (int i = 0; i < 3; ++i) {
      CHECK(out.beta->value.at(i) == doctest::Approx(std::exp(scores[i]) / denom).epsilon(1e-12));
      beta_sum += out.beta->value.at(i);
    }
    CHECK(beta_sum == doctest::Approx(1.0).epsilon(1e-9));
    for (int k = 0; k < d; ++k) {
      double expect = 0;
      for (int i = 0; i < 3; ++i) expect += std::exp(scores[i]) / denom * s.at(i, k);
      CHECK(out.bag_vector->value.at(k) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("aggregate_one picks the top-scoring sentence") {
  Rng rng(2);
  const Tensor s = random_tensor({3, 4}, rng);

  SUBCASE("single sentence") {
    Tape t;
    const auto out = agg::aggregate_one(t, t.constant(random_tensor({1, 4}, rng)), {0.2});
    CHECK(out.chosen == 0);
  }
  SUBCASE("planted score gap") {
    Tape t;
    const auto out = agg::aggregate_one(t, t.constant(s), {0.1, 0.9, 0.3});
    CHECK(out.chosen == 1);
    for (int k = 0; k < 4; ++k) CHECK(out.bag_vector->value.at(k) == s.at(1, k));
  }
  SUBCASE("ties go to the lowest index") {
    Tape t;
    const auto out = agg::aggregate_one(t, t.constant(s), {0.5, 0.5, 0.5});
    CHECK(out.chosen == 0);
  }
}

TEST_CASE("aggregate_ave") {
  Rng rng(3);
  SUBCASE("single row is the identity") {
    Tape t;
    const Tensor s = random_tensor({1, 5}, rng);
    Var z = agg::aggregate_ave(t, t.constant(s));
    for (int k = 0; k < 5; ++k) CHECK(z->value.at(k) == doctest::Approx(s.at(0, k)));
  }
  SUBCASE("opposite vectors cancel") {
    Tape t;
    Tensor s({2, 3}, {1, -2, 3, -1, 2, -3});
    Var z = agg::aggregate_ave(t, t.constant(s));
    for (double v : z->value.values) CHECK(v == doctest::Approx(0.0));
  }
  SUBCASE("four rows against the mean oracle") {
    Tape t;
    const Tensor s = random_tensor({4, 3}, rng);
    Var z = agg::aggregate_ave(t, t.constant(s));
    for (int k = 0; k < 3; ++k) {
      double mean = 0;
      for (int i = 0; i < 4; ++i) mean += s.at(i, k);
      CHECK(z->value.at(k) == doctest::Approx(mean / 4));
    }
  }
}

TEST_CASE("classify") {
  Rng rng(4);
  const int d = 4, R = 5;

  SUBCASE("zero weights and bias give the uniform distribution") {
    Tape t;
    Var p = agg::classify(t, t.constant(random_tensor({d}, rng)), t.constant(Tensor({R, d})),
                          t.constant(Tensor({R})));
    for (double v : p->value.values) CHECK(v == doctest::Approx(1.0 / R));
  }
  SUBCASE("a huge bias logit saturates to one-hot") {
    Tape t;
    Tensor b({R});
    b.at(2) = 1e3;
    Var p = agg::classify(t, t.constant(random_tensor({d}, rng)), t.constant(Tensor({R, d})),
                          t.constant(b));
    CHECK(p->value.at(2) == doctest::Approx(1.0));
  }
  SUBCASE("small case against the softmax oracle") {
    const Tensor z = random_tensor({d}, rng);
    const Tensor w = random_tensor({R, d}, rng);
    const Tensor b = random_tensor({R}, rng);
    Tape t;
    Var p = agg::classify(t, t.constant(z), t.constant(w), t.constant(b));
    std::vector<double> logits(R);
    double denom = 0;
    for (int r = 0; r < R; ++r) {
      double acc = b.at(r);
      for (int k = 0; k < d; ++k) acc += w.at(r, k) * z.at(k);
      logits[static_cast<std::size_t>(r)] = acc;
    }
    for (double l : logits) denom += std::exp(l);
    double total = 0;
    for (int r = 0; r < R; ++r) {
      CHECK(p->value.at(r) == doctest::Approx(std::exp(logits[r]) / denom).epsilon(1e-12));
      total += p->value.at(r);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("score_bag_eval") {
  Rng rng(5);
  const int d = 4, R = 3;
  const Tensor a = random_tensor({d}, rng);
  const Tensor rel = random_tensor({R, d}, rng);
  const Tensor w = random_tensor({R, d}, rng);
  const Tensor b = random_tensor({R}, rng);

  SUBCASE("single-sentence bag reduces to plain classification") {
    const Tensor s = random_tensor({1, d}, rng);
    Tape t;
    const auto scores = agg::score_bag_eval(t, t.constant(s), t.constant(a), t.constant(rel),
                                            t.constant(w), t.constant(b), agg::Mode::att);
    Tape t2;
    Var direct = agg::classify(t2, ops::row(t2, t2.constant(s), 0), t2.constant(w), t2.constant(b));
    for (int r = 0; r < R; ++r)
      CHECK(scores.probability[static_cast<std::size_t>(r)] ==
            doctest::Approx(direct->value.at(r)).epsilon(1e-12));
  }
  SUBCASE("att mode against exhaustive per-relation computation") {
    const Tensor s = random_tensor({3, d}, rng);
    Tape t;
    const auto scores = agg::score_bag_eval(t, t.constant(s), t.constant(a), t.constant(rel),
                                            t.constant(w), t.constant(b), agg::Mode::att);
    for (int r = 0; r < R; ++r) {
      // brute force: beta_r, z_r, softmax, take entry r
      std::vector<double> c(3);
      for (int i = 0; i < 3; ++i) {
        double acc = 0;
        for (int k = 0; k < d; ++k) acc += s.at(i, k) * a.at(k) * rel.at(r, k);
        c[static_cast<std::size_t>(i)] = acc;
      }
      double denom = 0;
      for (double v : c) denom += std::exp(v);
      std::vector<double> z(d, 0.0);
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < d; ++k) z[static_cast<std::size_t>(k)] += std::exp(c[i]) / denom * s.at(i, k);
      std::vector<double> logits(R);
      double lden = 0;
      for (int rr = 0; rr < R; ++rr) {
        double acc = b.at(rr);
        for (int k = 0; k < d; ++k) acc += w.at(rr, k) * z[static_cast<std::size_t>(k)];
        logits[static_cast<std::size_t>(rr)] = acc;
      }
      for (double l : logits) lden += std::exp(l);
      CHECK(scores.probability[static_cast<std::size_t>(r)] ==
            doctest::Approx(std::exp(logits[r]) / lden).epsilon(1e-10));
      CHECK(scores.beta[static_cast<std::size_t>(r)].size() == 3);
    }
  }
  SUBCASE("ave mode is one classification") {
    const Tensor s = random_tensor({3, d}, rng);
    Tape t;
    const auto scores = agg::score_bag_eval(t, t.constant(s), t.constant(a), t.constant(rel),
                                            t.constant(w), t.constant(b), agg::Mode::ave);
    Tape t2;
    Var direct =
        agg::classify(t2, agg::aggregate_ave(t2, t2.constant(s)), t2.constant(w), t2.constant(b));
    for (int r = 0; r < R; ++r)
      CHECK(scores.probability[static_cast<std::size_t>(r)] == doctest::Approx(direct->value.at(r)));
    CHECK(scores.beta.empty());
    double total = 0;
    for (double p : scores.probability) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("bag vector stays inside the per-dimension hull and is permutation invariant") {
  Rng rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + rng.uniform_int(6), d = 5;
    const Tensor s = random_tensor({n, d}, rng);
    const Tensor a = random_tensor({d}, rng);
    const Tensor r = random_tensor({d}, rng);

    Tape t;
    const auto att = agg::selective_attention(t, t.constant(s), t.constant(a), t.constant(r));
    Var ave = agg::aggregate_ave(t, t.constant(s));
    for (int k = 0; k < d; ++k) {
      double lo = s.at(0, k), hi = s.at(0, k);
      for (int i = 1; i < n; ++i) {
        lo = std::min(lo, s.at(i, k));
        hi = std::max(hi, s.at(i, k));
      }
      CHECK(att.bag_vector->value.at(k) >= lo - 1e-12);
      CHECK(att.bag_vector->value.at(k) <= hi + 1e-12);
      CHECK(ave->value.at(k) >= lo - 1e-12);
      CHECK(ave->value.at(k) <= hi + 1e-12);
    }

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
    Tensor ps({n, d});
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < d; ++k) ps.at(i, k) = s.at(perm[i], k);
    Tape t2;
    const auto att2 = agg::selective_attention(t2, t2.constant(ps), t2.constant(a), t2.constant(r));
    Var ave2 = agg::aggregate_ave(t2, t2.constant(ps));
    for (int k = 0; k < d; ++k) {
      CHECK(std::fabs(att2.bag_vector->value.at(k) - att.bag_vector->value.at(k)) <= 1e-9);
      CHECK(std::fabs(ave2->value.at(k) - ave->value.at(k)) <= 1e-9);
    }
  }
}

TEST_CASE("selective attention parameters pass the finite-difference check") {
  Rng rng(7);
  const int d = 4, R = 3;
  Param s(random_tensor({3, d}, rng), "sentences");
  Param a(random_tensor({d}, rng), "att_diag");
  Param rel(random_tensor({R, d}, rng), "rel_emb");
  Param w(random_tensor({R, d}, rng), "cls_w");
  Param b(random_tensor({R}, rng), "cls_b");
  auto loss = [&](Tape& t) {
    const auto att =
        agg::selective_attention(t, t.param(s), t.param(a), ops::row(t, t.param(rel), 1));
    Var logits = agg::classify_logits(t, att.bag_vector, t.param(w), t.param(b));
    return ops::neg(t, ops::pick(t, ops::log_softmax_vec(t, logits), 1));
  };
  const auto report = finite_difference_check(loss, {&s, &a, &rel, &w, &b}, 1e-5, 1e-3);
  INFO(report.to_string());
  CHECK(report.passed);
}
