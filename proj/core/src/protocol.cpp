#include "dipe/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace dipe::protocol {

std::string to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::kCliffordLocal: return "clifford";
    case EnsembleKind::kHaarLocal: return "haar";
    case EnsembleKind::kPauliShadowIndependent: return "pauli_shadow";
  }
  return "?";
}

double EstimateRecord::block_mean() const {
  double acc = 0.0;
  for (double v : block_values) acc += v;
  return acc / static_cast<double>(block_values.size());
}

double EstimateRecord::block_variance() const {
  const double m = block_mean();
  double acc = 0.0;
  for (double v : block_values) acc += (v - m) * (v - m);
  return acc / static_cast<double>(block_values.size() - 1);
}

double EstimateRecord::standard_error() const {
  return std::sqrt(block_variance() / static_cast<double>(block_values.size()));
}

Eigen::Matrix2cd sample_haar_unitary(SplitMix64& rng) {
  Eigen::Vector2cd col0(Complex(rng.gaussian(), rng.gaussian()),
                        Complex(rng.gaussian(), rng.gaussian()));
  Eigen::Vector2cd col1(Complex(rng.gaussian(), rng.gaussian()),
                        Complex(rng.gaussian(), rng.gaussian()));
  col0.normalize();
  col1 -= col0.dot(col1) * col0;
  col1.normalize();
  Eigen::Matrix2cd u;
  u.col(0) = col0;
  u.col(1) = col1;
  return u;
}

const Eigen::Matrix2cd& clifford_basis_rotation(int basis) {
  static const Eigen::Matrix2cd kRot[3] = {
      // X: Hadamard
      (Eigen::Matrix2cd() << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2).finished(),
      // Y: H S†, so V† Z V = Y
      (Eigen::Matrix2cd() << M_SQRT1_2, Complex(0, -M_SQRT1_2), M_SQRT1_2, Complex(0, M_SQRT1_2))
          .finished(),
      // Z: identity
      Eigen::Matrix2cd::Identity()};
  return kRot[basis];
}

std::vector<double> rotated_outcome_distribution(const DensityOperator& rho,
                                                 const std::vector<Eigen::Matrix2cd>& unitaries) {
  const int n = rho.n;
  if (static_cast<int>(unitaries.size()) != n)
    throw std::invalid_argument("rotated_outcome_distribution: one unitary per qubit");
  const std::int64_t dim = rho.dim();
  ComplexMatrix m = rho.matrix;
  ComplexMatrix next(dim, dim);
  for (int q = 0; q < n; ++q) {
    const Eigen::Matrix2cd& u = unitaries[q];
    const std::int64_t bit = std::int64_t{1} << (n - 1 - q);
    // rows
    for (std::int64_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      for (std::int64_t j = 0; j < dim; ++j) {
        const Complex r0 = m(i, j), r1 = m(i | bit, j);
        next(i, j) = u(0, 0) * r0 + u(0, 1) * r1;
        next(i | bit, j) = u(1, 0) * r0 + u(1, 1) * r1;
      }
    }
    // columns
    for (std::int64_t j = 0; j < dim; ++j) {
      if (j & bit) continue;
      for (std::int64_t i = 0; i < dim; ++i) {
        const Complex c0 = next(i, j), c1 = next(i, j | bit);
        m(i, j) = c0 * std::conj(u(0, 0)) + c1 * std::conj(u(0, 1));
        m(i, j | bit) = c0 * std::conj(u(1, 0)) + c1 * std::conj(u(1, 1));
      }
    }
  }
  std::vector<double> p(dim);
  double norm = 0.0;
  for (std::int64_t i = 0; i < dim; ++i) {
    p[i] = std::max(0.0, m(i, i).real());
    norm += p[i];
  }
  for (double& v : p) v /= norm;
  return p;
}

std::vector<double> depolarized_outcome_transform(std::vector<double> probabilities, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarized_outcome_transform: p out of [0,1]");
  const std::size_t dim = probabilities.size();
  if (dim == 0 || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("depolarized_outcome_transform: length must be a power of two");
  const double flip = p / 2.0;
  std::vector<double> next(dim);
  for (std::size_t bit = 1; bit < dim; bit <<= 1) {
    for (std::size_t i = 0; i < dim; ++i) {
      const std::size_t j = i ^ bit;
      next[i] = (1.0 - flip) * probabilities[i] + flip * probabilities[j];
    }
    probabilities.swap(next);
  }
  return probabilities;
}

double conditional_mean(const std::vector<double>& p, const std::vector<double>& q, int n) {
  double acc = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s)
    for (std::size_t t = 0; t < q.size(); ++t)
      acc += kernels::unique_kernel_value(n, static_cast<std::uint32_t>(s),
                                          static_cast<std::uint32_t>(t)) *
             p[s] * q[t];
  return acc;
}

namespace {

std::uint32_t sample_outcome(const std::vector<double>& cdf, SplitMix64& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
}

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0 + 1e-15;
  return cdf;
}

// one shared-randomness block: substreams (seed, block, {0: unitary, 1: Alice, 2: Bob})
double run_block(const DensityOperator& rho, const DensityOperator& sigma, const RunConfig& cfg,
                 std::int64_t block) {
  const int n = cfg.n;
  SplitMix64 rng_u(cfg.seed, {static_cast<std::uint64_t>(block), 0});
  std::vector<Eigen::Matrix2cd> us(n);
  for (int q = 0; q < n; ++q) {
    if (cfg.ensemble == EnsembleKind::kCliffordLocal)
      us[q] = clifford_basis_rotation(static_cast<int>(rng_u.uniform_int(3)));
    else
      us[q] = sample_haar_unitary(rng_u);
  }

  std::vector<double> pa = rotated_outcome_distribution(rho, us);
  std::vector<double> pb = rotated_outcome_distribution(sigma, us);
  if (cfg.depolarize_p > 0.0) {
    pa = depolarized_outcome_transform(std::move(pa), cfg.depolarize_p);
    pb = depolarized_outcome_transform(std::move(pb), cfg.depolarize_p);
  }
  const auto cdf_a = cumulative(pa);
  const auto cdf_b = cumulative(pb);

  SplitMix64 rng_a(cfg.seed, {static_cast<std::uint64_t>(block), 1});
  SplitMix64 rng_b(cfg.seed, {static_cast<std::uint64_t>(block), 2});
  std::vector<std::uint32_t> ss(cfg.n_shots), ts(cfg.n_shots);
  for (int j = 0; j < cfg.n_shots; ++j) ss[j] = sample_outcome(cdf_a, rng_a);
  for (int k = 0; k < cfg.n_shots; ++k) ts[k] = sample_outcome(cdf_b, rng_b);

  double acc = 0.0;
  for (int j = 0; j < cfg.n_shots; ++j)
    for (int k = 0; k < cfg.n_shots; ++k) acc += kernels::unique_kernel_value(n, ss[j], ts[k]);
  return acc / (static_cast<double>(cfg.n_shots) * static_cast<double>(cfg.n_shots));
}

}  // namespace

EstimateRecord run_shared_lrm(const DensityOperator& rho, const DensityOperator& sigma,
                              const RunConfig& config) {
  if (rho.n != sigma.n || rho.n != config.n)
    throw std::invalid_argument("run_shared_lrm: qubit count mismatch");
  if (config.n > qcore::kQubitCap) throw std::invalid_argument("run_shared_lrm: beyond dense cap");
  if (config.n_unitaries < 1 || config.n_shots < 1)
    throw std::invalid_argument("run_shared_lrm: N_U, N_M >= 1");
  if (config.ensemble == EnsembleKind::kPauliShadowIndependent)
    throw std::invalid_argument("run_shared_lrm: use run_pauli_shadow for the shadow protocol");

  const auto t0 = std::chrono::steady_clock::now();
  EstimateRecord rec;
  rec.config = config;
  rec.block_values.assign(config.n_unitaries, 0.0);

  const int nthreads = std::max(1, config.threads);
  if (nthreads == 1) {
    for (std::int64_t l = 0; l < config.n_unitaries; ++l)
      rec.block_values[l] = run_block(rho, sigma, config, l);
  } else {
    // fixed block partition: results are identical for any thread count
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t] {
        for (std::int64_t l = t; l < config.n_unitaries; l += nthreads)
          rec.block_values[l] = run_block(rho, sigma, config, l);
      });
    for (auto& th : pool) th.join();
  }

  double acc = 0.0;
  for (double v : rec.block_values) acc += v;
  rec.estimate = acc / static_cast<double>(config.n_unitaries);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

EstimateRecord run_pauli_shadow(const DensityOperator& rho, const DensityOperator& sigma,
                                std::int64_t n_snapshots, std::uint64_t seed) {
  if (rho.n != sigma.n) throw std::invalid_argument("run_pauli_shadow: qubit count mismatch");
  if (rho.n > qcore::kQubitCap) throw std::invalid_argument("run_pauli_shadow: beyond dense cap");
  if (n_snapshots < 1) throw std::invalid_argument("run_pauli_shadow: N >= 1");
  const int n = rho.n;
  const auto t0 = std::chrono::steady_clock::now();

  // snapshot = (basis, outcome bit) per qubit; party substream ids (0, party)
  auto collect = [&](const DensityOperator& state, int party) {
    std::vector<std::uint8_t> snaps(static_cast<std::size_t>(n_snapshots) * n * 2);
    SplitMix64 rng(seed, {0, static_cast<std::uint64_t>(party)});
    std::vector<Eigen::Matrix2cd> us(n);
    for (std::int64_t i = 0; i < n_snapshots; ++i) {
      std::uint8_t* rec = &snaps[static_cast<std::size_t>(i) * n * 2];
      for (int q = 0; q < n; ++q) {
        rec[2 * q] = static_cast<std::uint8_t>(rng.uniform_int(3));
        us[q] = clifford_basis_rotation(rec[2 * q]);
      }
      const auto p = rotated_outcome_distribution(state, us);
      const auto cdf = cumulative(p);
      const std::uint32_t outcome = sample_outcome(cdf, rng);
      for (int q = 0; q < n; ++q)
        rec[2 * q + 1] = static_cast<std::uint8_t>(qcore::basis_bit(outcome, n, q));
    }
    return snaps;
  };

  const auto snaps_a = collect(rho, 1);
  const auto snaps_b = collect(sigma, 2);

  // tr[s_psi s_phi]: 5 same state, -4 orthogonal same basis, 1/2 cross-basis
  auto factor = [](std::uint8_t ba, std::uint8_t oa, std::uint8_t bb, std::uint8_t ob) {
    if (ba != bb) return 0.5;
    return oa == ob ? 5.0 : -4.0;
  };

  double acc = 0.0;
  for (std::int64_t i = 0; i < n_snapshots; ++i) {
    const std::uint8_t* ra = &snaps_a[static_cast<std::size_t>(i) * n * 2];
    for (std::int64_t j = 0; j < n_snapshots; ++j) {
      const std::uint8_t* rb = &snaps_b[static_cast<std::size_t>(j) * n * 2];
      double w = 1.0;
      for (int q = 0; q < n; ++q) w *= factor(ra[2 * q], ra[2 * q + 1], rb[2 * q], rb[2 * q + 1]);
      acc += w;
    }
  }

  EstimateRecord rec;
  rec.config.n = n;
  rec.config.seed = seed;
  rec.config.n_unitaries = n_snapshots;
  rec.config.n_shots = 1;
  rec.config.ensemble = EnsembleKind::kPauliShadowIndependent;
  rec.estimate = acc / (static_cast<double>(n_snapshots) * static_cast<double>(n_snapshots));
  rec.block_values = {rec.estimate};
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

VarianceComparison empirical_variance_decomposition(const DensityOperator& rho,
                                                    const DensityOperator& sigma,
                                                    EnsembleKind ensemble, int n_shots,
                                                    std::int64_t blocks, std::uint64_t seed) {
  RunConfig cfg;
  cfg.n = rho.n;
  cfg.n_unitaries = blocks;
  cfg.n_shots = n_shots;
  cfg.seed = seed;
  cfg.ensemble = ensemble;
  const EstimateRecord rec = run_shared_lrm(rho, sigma, cfg);

  VarianceComparison out;
  out.overlap = qcore::inner_product(rho, sigma);
  out.empirical_mean = rec.block_mean();
  out.empirical_variance = rec.block_variance();
  out.se_mean = rec.standard_error();

  // SE of the sample variance from the empirical fourth central moment
  const double b = static_cast<double>(blocks);
  double m4 = 0.0;
  for (double v : rec.block_values) {
    const double d = v - out.empirical_mean;
    m4 += d * d * d * d;
  }
  m4 /= b;
  const double s2 = out.empirical_variance;
  out.se_variance = std::sqrt(std::max(0.0, (m4 - s2 * s2 * (b - 3.0) / (b - 1.0)) / b));

  const Ensemble mens =
      ensemble == EnsembleKind::kCliffordLocal ? Ensemble::kClifford : Ensemble::kHaar;
  const double a = moments::coeff_A(rho, sigma);
  const double c = moments::coeff_C(rho, sigma);
  const double bb = moments::coeff_B(rho, sigma, mens, true);
  out.exact = moments::variance_terms(out.overlap, a, c, bb, n_shots);

  out.z_mean = (out.empirical_mean - out.overlap) / out.se_mean;
  out.z_variance = (out.empirical_variance - out.exact.total()) / out.se_variance;
  return out;
}

}  // namespace dipe::protocol
