#include "cpca/simgen.hpp"

#include <algorithm>
#include <cmath>

#include "cpca/linalg.hpp"

namespace cpca {

std::size_t SimTruth::total_rank() const {
  std::size_t total = r_c;
  for (const auto& l : lambda) total += l.size();
  return total;
}

namespace {

struct Design {
  std::size_t n;
  std::size_t p;
  std::size_t J;
  std::size_t r_c;
  std::vector<std::pair<double, double>> theta;  // per-cluster variance means
};

Design design_for(int id) {
  switch (id) {
    case 1:
      return {50, 100, 5, 3, {{25, 25}, {25, 5}, {25, 5}, {25, 5}, {5, 5}}};
    case 2:
      return {30, 100, 5, 3, {{25, 25}, {25, 5}, {25, 5}, {25, 5}, {5, 5}}};
    case 3:
      return {50, 200, 10, 3, {{25, 25}, {25, 25}, {25, 5}, {25, 5}, {25, 5}, {25, 5}, {25, 5}, {25, 5}, {5, 5}, {5, 5}}};
    case 4:
      return {30, 100, 5, 0, {{25, 25}, {25, 5}, {25, 5}, {25, 5}, {5, 5}}};
    default:
      throw InvalidInput("gen_example: id must be 1..4");
  }
}

constexpr double kEigenFloor = 0.1;  // normal draws of eigenvalues stay positive
constexpr std::size_t kClusterSize = 20;
constexpr std::size_t kClusterRank = 2;
constexpr double kNoiseSd = 0.5;
constexpr double kCommonEigenMean = 125.0;
constexpr double kCommonEigenVar = 5.0;

Matrix scores_from_eigen(const Vector& eigenvalues, std::size_t rows, Rng& rng) {
  Matrix s(rows, eigenvalues.size());
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    const double sd = std::sqrt(eigenvalues[j]);
    for (std::size_t i = 0; i < rows; ++i) s(i, j) = sd * rng.normal();
  }
  return s;
}

}  // namespace

SimPanel gen_example(int id, std::uint64_t seed) {
  const Design d = design_for(id);
  Rng rng(seed);

  SimTruth truth;
  truth.n = d.n;
  truth.p = d.p;
  truth.r_c = d.r_c;
  truth.J = d.J;
  truth.cluster_sizes.assign(d.J, kClusterSize);
  truth.theta = 1.0;

  std::vector<std::size_t> labels(d.p);
  for (std::size_t j = 0; j < d.J; ++j) {
    for (std::size_t a = 0; a < kClusterSize; ++a) labels[j * kClusterSize + a] = j + 1;
  }
  truth.partition = compact_partition(labels);

  // Frames and eigenvalue draws, clusters in order.
  if (d.r_c > 0) {
    truth.phi = random_orthonormal(d.p, d.r_c, rng);
    truth.delta.resize(d.r_c);
    for (auto& v : truth.delta) v = std::max(kEigenFloor, rng.normal(kCommonEigenMean, std::sqrt(kCommonEigenVar)));
    std::sort(truth.delta.begin(), truth.delta.end(), std::greater<double>());
  } else {
    truth.phi = Matrix(d.p, 0);
  }
  truth.psi.resize(d.J);
  truth.lambda.resize(d.J);
  truth.sigma.assign(d.J, kNoiseSd);
  for (std::size_t j = 0; j < d.J; ++j) {
    truth.psi[j] = random_orthonormal(kClusterSize, kClusterRank, rng);
    Vector l(kClusterRank);
    l[0] = std::max(kEigenFloor, rng.normal(d.theta[j].first, 1.0));
    l[1] = std::max(kEigenFloor, rng.normal(d.theta[j].second, 1.0));
    std::sort(l.begin(), l.end(), std::greater<double>());
    truth.lambda[j] = std::move(l);
  }

  // Scores and noise for 2n observations; first half trains, second tests.
  const std::size_t rows = 2 * d.n;
  truth.scores.g = d.r_c > 0 ? scores_from_eigen(truth.delta, rows, rng) : Matrix(rows, 0);
  Matrix x(rows, d.p);
  if (d.r_c > 0) x = matmul_nt(truth.scores.g, truth.phi);
  truth.scores.f.resize(d.J);
  for (std::size_t j = 0; j < d.J; ++j) {
    truth.scores.f[j] = scores_from_eigen(truth.lambda[j], rows, rng);
    const Matrix block = matmul_nt(truth.scores.f[j], truth.psi[j]);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t a = 0; a < kClusterSize; ++a) {
        x(i, j * kClusterSize + a) += block(i, a) + kNoiseSd * rng.normal();
      }
    }
  }

  // Population covariance.
  truth.sigma_pop = Matrix(d.p, d.p);
  for (std::size_t a = 0; a < d.p; ++a) {
    for (std::size_t b = 0; b < d.p; ++b) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d.r_c; ++k) acc += truth.delta[k] * truth.phi(a, k) * truth.phi(b, k);
      truth.sigma_pop(a, b) = acc;
    }
  }
  for (std::size_t j = 0; j < d.J; ++j) {
    const std::size_t off = j * kClusterSize;
    for (std::size_t a = 0; a < kClusterSize; ++a) {
      for (std::size_t b = 0; b < kClusterSize; ++b) {
        double acc = 0.0;
        for (std::size_t h = 0; h < kClusterRank; ++h) {
          acc += truth.lambda[j][h] * truth.psi[j](a, h) * truth.psi[j](b, h);
        }
        truth.sigma_pop(off + a, off + b) += acc;
      }
      truth.sigma_pop(off + a, off + a) += kNoiseSd * kNoiseSd;
    }
  }

  // Regression truth: unit weights on the common block, the last
  // cluster's components carry the only nonzero cluster weights.
  truth.alpha.assign(d.r_c, 1.0);
  truth.beta.assign(d.J * kClusterRank, 0.0);
  truth.beta[d.J * kClusterRank - 2] = kPcrBetaLast;
  truth.beta[d.J * kClusterRank - 1] = kPcrBetaLast;

  SimPanel out;
  out.truth = std::move(truth);
  out.train.values = Matrix(d.n, d.p);
  out.test.values = Matrix(d.n, d.p);
  for (std::size_t i = 0; i < d.n; ++i) {
    std::copy(x.row(i), x.row(i) + d.p, out.train.values.row(i));
    std::copy(x.row(d.n + i), x.row(d.n + i) + d.p, out.test.values.row(i));
  }
  out.train.validate();
  out.test.validate();
  return out;
}

Vector gen_pcr_response(const SimTruth& truth, const TrueScores& scores, int example, Rng& rng,
                        double noise_sd) {
  if (example < 1 || example > 3) throw InvalidInput("gen_pcr_response: example must be 1..3");
  const std::size_t rows = scores.f.empty() ? scores.g.rows() : scores.f.front().rows();
  if (truth.beta.size() != truth.J * kClusterRank) {
    throw InvalidInput("gen_pcr_response: scores inconsistent with truth");
  }

  Vector y(rows, 0.0);
  if (truth.r_c > 0) {
    if (scores.g.cols() != truth.alpha.size()) {
      throw InvalidInput("gen_pcr_response: common score width mismatch");
    }
    for (std::size_t i = 0; i < rows; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < truth.alpha.size(); ++k) acc += truth.alpha[k] * scores.g(i, k);
      y[i] = acc;
    }
  }
  std::size_t off = 0;
  for (std::size_t j = 0; j < truth.J; ++j) {
    const Matrix& f = scores.f[j];
    for (std::size_t h = 0; h < f.cols(); ++h, ++off) {
      const double b = truth.beta[off];
      if (b == 0.0) continue;
      for (std::size_t i = 0; i < rows; ++i) y[i] += b * f(i, h);
    }
  }
  if (noise_sd > 0.0) {
    for (std::size_t i = 0; i < rows; ++i) y[i] += noise_sd * rng.normal();
  }
  return y;
}

Matrix sample_from_truth(const SimTruth& truth, std::size_t rows, Rng& rng) {
  Matrix x(rows, truth.p);
  if (truth.r_c > 0) {
    const Matrix g = scores_from_eigen(truth.delta, rows, rng);
    x = matmul_nt(g, truth.phi);
  }
  std::size_t off = 0;
  for (std::size_t j = 0; j < truth.J; ++j) {
    const Matrix f = scores_from_eigen(truth.lambda[j], rows, rng);
    const Matrix block = matmul_nt(f, truth.psi[j]);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t a = 0; a < truth.cluster_sizes[j]; ++a) {
        x(i, off + a) += block(i, a) + truth.sigma[j] * rng.normal();
      }
    }
    off += truth.cluster_sizes[j];
  }
  return x;
}

DataMatrix gen_block_panel(std::size_t days, std::size_t p, std::size_t clusters,
                           std::size_t r_common, std::uint64_t seed, double scale) {
  if (clusters == 0 || p % clusters != 0) {
    throw InvalidInput("gen_block_panel: p must be a multiple of the cluster count");
  }
  const std::size_t pj = p / clusters;
  if (pj < 2) throw InvalidInput("gen_block_panel: clusters need at least 2 variables");
  Rng rng(seed);

  Matrix x(days, p);
  if (r_common > 0) {
    const Matrix phi = random_orthonormal(p, r_common, rng);
    Vector delta(r_common);
    for (auto& v : delta) v = std::max(kEigenFloor, rng.normal(kCommonEigenMean, std::sqrt(kCommonEigenVar)));
    const Matrix g = scores_from_eigen(delta, days, rng);
    x = matmul_nt(g, phi);
  }
  for (std::size_t j = 0; j < clusters; ++j) {
    const std::size_t rank = std::min<std::size_t>(kClusterRank, pj - 1);
    const Matrix psi = random_orthonormal(pj, rank, rng);
    Vector lam(rank);
    for (std::size_t h = 0; h < rank; ++h) {
      lam[h] = std::max(kEigenFloor, rng.normal(h == 0 ? 25.0 : 5.0, 1.0));
    }
    const Matrix f = scores_from_eigen(lam, days, rng);
    const Matrix block = matmul_nt(f, psi);
    for (std::size_t i = 0; i < days; ++i) {
      for (std::size_t a = 0; a < pj; ++a) {
        x(i, j * pj + a) += block(i, a) + kNoiseSd * rng.normal();
      }
    }
  }
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] *= scale;
  DataMatrix out;
  out.values = std::move(x);
  out.validate();
  return out;
}

}  // namespace cpca
