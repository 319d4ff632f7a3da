#include <doctest.h>

#include <cmath>

#include "cpca/covariance.hpp"
#include "cpca/simgen.hpp"

using namespace cpca;

TEST_CASE("generated panel shapes per design") {
  const SimPanel e1 = gen_example(1, 11);
  CHECK(e1.train.n() == 50);
  CHECK(e1.train.p() == 100);
  CHECK(e1.test.n() == 50);
  CHECK(e1.test.p() == 100);
  CHECK(e1.truth.J == 5);
  CHECK(e1.truth.total_rank() == 13);  // 3 common + 5 clusters x 2

  const SimPanel e3 = gen_example(3, 11);
  CHECK(e3.train.n() == 50);
  CHECK(e3.train.p() == 200);
  CHECK(e3.truth.J == 10);

  const SimPanel e4 = gen_example(4, 11);
  CHECK(e4.train.n() == 30);
  CHECK(e4.truth.r_c == 0);
  CHECK(e4.truth.total_rank() == 10);

  CHECK_THROWS_AS(gen_example(5, 11), InvalidInput);
}

TEST_CASE("same seed reproduces the panel bit for bit") {
  const SimPanel a = gen_example(1, 321);
  const SimPanel b = gen_example(1, 321);
  REQUIRE(a.train.values.size() == b.train.values.size());
  for (std::size_t i = 0; i < a.train.values.size(); ++i) {
    CHECK(a.train.values.data()[i] == b.train.values.data()[i]);
  }
  for (std::size_t i = 0; i < a.truth.sigma_pop.size(); ++i) {
    CHECK(a.truth.sigma_pop.data()[i] == b.truth.sigma_pop.data()[i]);
  }
}

TEST_CASE("generator frames satisfy the declared structure") {
  const SimPanel e1 = gen_example(1, 99);
  const SimTruth& t = e1.truth;
  // orthonormal frames
  const Matrix ptp = matmul_tn(t.phi, t.phi);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(ptp(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
  for (const auto& psi : t.psi) {
    const Matrix g = matmul_tn(psi, psi);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(std::abs(g(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
  }
  // eigenvalue draws positive and descending
  for (std::size_t k = 1; k < t.delta.size(); ++k) CHECK(t.delta[k] <= t.delta[k - 1]);
  for (const auto& l : t.lambda) {
    CHECK(l[0] >= l[1]);
    CHECK(l[1] > 0.0);
  }
  // cluster sizes partition the panel
  std::size_t total = 0;
  for (auto s : t.cluster_sizes) total += s;
  CHECK(total == t.p);
}

TEST_CASE("sample covariance of many draws approaches the population") {
  const SimPanel e1 = gen_example(1, 2024);
  Rng rng(555);
  const Matrix big = sample_from_truth(e1.truth, 100000, rng);
  DataMatrix d;
  d.values = big;
  d.validate();
  const CovarianceEstimate s = sample_cov(d);
  const double rel =
      std::sqrt(frob_distance(s.sigma, e1.truth.sigma_pop) / frob_sq(e1.truth.sigma_pop));
  CHECK(rel < 0.02);  // within 2% relative Frobenius error at n = 1e5
}

TEST_CASE("true scores are mutually uncorrelated at scale") {
  SimTruth truth = gen_example(1, 31).truth;
  Rng rng(66);
  // draw 1e4 fresh score rows by regenerating a long panel's structure
  const std::size_t n = 10000;
  Matrix g(n, truth.r_c);
  std::vector<Matrix> f(truth.J, Matrix(n, 2));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < truth.r_c; ++k) g(i, k) = std::sqrt(truth.delta[k]) * rng.normal();
    for (std::size_t j = 0; j < truth.J; ++j)
      for (std::size_t h = 0; h < 2; ++h) f[j](i, h) = std::sqrt(truth.lambda[j][h]) * rng.normal();
  }
  Matrix all = g;
  for (const auto& fj : f) all = hcat(all, fj);
  const Matrix c = correlation_abs(make_panel(all));
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j)
      if (i != j) CHECK(c(i, j) < 0.1);
}

TEST_CASE("pcr response structure and variance") {
  const SimPanel e3 = gen_example(3, 47);
  const SimTruth& t = e3.truth;
  REQUIRE(t.beta.size() == 20);  // J = 10 clusters x 2 components
  for (std::size_t i = 0; i + 2 < t.beta.size(); ++i) CHECK(t.beta[i] == 0.0);
  CHECK(t.beta[18] == kPcrBetaLast);
  CHECK(t.beta[19] == kPcrBetaLast);
  REQUIRE(t.alpha.size() == 3);
  for (double a : t.alpha) CHECK(a == 1.0);

  // zero-noise response reproduces the linear combination exactly
  Rng rng(48);
  const Vector y0 = gen_pcr_response(t, t.scores, 3, rng, 0.0);
  for (std::size_t i = 0; i < 5; ++i) {
    double expect = 0;
    for (std::size_t k = 0; k < 3; ++k) expect += t.scores.g(i, k);
    expect += kPcrBetaLast * (t.scores.f[9](i, 0) + t.scores.f[9](i, 1));
    CHECK(y0[i] == doctest::Approx(expect).epsilon(1e-12));
  }

  // variance check over many draws:
  // var(y) = alpha' Sigma_g alpha + sum beta_j' Sigma_f beta_j + theta^2
  const SimPanel e1 = gen_example(1, 53);
  const SimTruth& t1 = e1.truth;
  double expect_var = 1.0;  // theta^2
  for (std::size_t k = 0; k < 3; ++k) expect_var += t1.delta[k];
  expect_var += kPcrBetaLast * kPcrBetaLast * (t1.lambda[4][0] + t1.lambda[4][1]);
  const std::size_t n = 100000;
  TrueScores s;
  Rng rng2(54);
  s.g = Matrix(n, 3);
  s.f.assign(5, Matrix(n, 2));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < 3; ++k) s.g(i, k) = std::sqrt(t1.delta[k]) * rng2.normal();
    for (std::size_t j = 0; j < 5; ++j)
      for (std::size_t h = 0; h < 2; ++h) s.f[j](i, h) = std::sqrt(t1.lambda[j][h]) * rng2.normal();
  }
  const Vector y = gen_pcr_response(t1, s, 1, rng2);
  double mean = 0;
  for (double v : y) mean += v;
  mean /= n;
  double var = 0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= n;
  CHECK(var == doctest::Approx(expect_var).epsilon(0.05));
}

TEST_CASE("block panel generator for backtests") {
  const DataMatrix p = gen_block_panel(252, 40, 5, 3, 7);
  CHECK(p.n() == 252);
  CHECK(p.p() == 40);
  CHECK_THROWS_AS(gen_block_panel(100, 41, 5, 3, 7), InvalidInput);
}
