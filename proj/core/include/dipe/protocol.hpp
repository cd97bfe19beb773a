#pragma once

#include "dipe/kernels.hpp"
#include "dipe/moments.hpp"
#include "dipe/qcore.hpp"
#include "dipe/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dipe::protocol {

using kernels::Ensemble;
using qcore::DensityOperator;

enum class EnsembleKind { kCliffordLocal, kHaarLocal, kPauliShadowIndependent };
std::string to_string(EnsembleKind k);

/// One run of the shared-randomness estimator: N_U unitary blocks, N_M shots
/// per block per party. Total copies per party N = N_U · N_M.
struct RunConfig {
  int n = 1;
  std::int64_t n_unitaries = 1;
  int n_shots = 1;
  std::uint64_t seed = 0;
  EnsembleKind ensemble = EnsembleKind::kCliffordLocal;
  /// Optional local depolarization applied on the classical outcome side
  /// (binary symmetric channel with flip probability p/2 per bit).
  double depolarize_p = 0.0;
  int threads = 1;
};

struct EstimateRecord {
  double estimate = 0.0;
  std::vector<double> block_values;
  RunConfig config;
  double wall_seconds = 0.0;

  double block_mean() const;
  double block_variance() const;  // unbiased sample variance of X_M
  double standard_error() const;  // of the estimate
};

/// Shared single-qubit randomized-measurement estimator with the unique
/// unbiased kernel (per-block X_M values retained).
EstimateRecord run_shared_lrm(const DensityOperator& rho, const DensityOperator& sigma,
                              const RunConfig& config);

/// Independent Pauli-shadow estimator: N snapshots per party,
/// g_hat = N^{-2} sum_{ij} tr[rho_hat_i sigma_hat_j].
EstimateRecord run_pauli_shadow(const DensityOperator& rho, const DensityOperator& sigma,
                                std::int64_t n_snapshots, std::uint64_t seed);

struct VarianceComparison {
  double empirical_mean = 0.0;
  double empirical_variance = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;
  moments::VarianceTerms exact;
  double overlap = 0.0;
  double z_mean = 0.0;      // (mean - overlap)/se_mean
  double z_variance = 0.0;  // (var - exact.total())/se_variance
};

/// Runs `blocks` independent X_M blocks and compares the empirical variance
/// against the exact four-term decomposition built from (A, C, B).
VarianceComparison empirical_variance_decomposition(const DensityOperator& rho,
                                                    const DensityOperator& sigma,
                                                    EnsembleKind ensemble, int n_shots,
                                                    std::int64_t blocks, std::uint64_t seed);

/// Haar-random U(2) element via Gram-Schmidt on Gaussian columns.
Eigen::Matrix2cd sample_haar_unitary(SplitMix64& rng);

/// Measurement rotation for a uniformly random Pauli basis: returns V with
/// V† Z V = X, Y or Z for basis index 0, 1, 2.
const Eigen::Matrix2cd& clifford_basis_rotation(int basis);

/// Per-bit binary symmetric channel with flip probability p/2 applied to a
/// probability vector over n-bit strings.
std::vector<double> depolarized_outcome_transform(std::vector<double> probabilities, double p);

/// Exact outcome distribution of rho measured after the product rotation
/// given by one 2x2 unitary per qubit.
std::vector<double> rotated_outcome_distribution(const DensityOperator& rho,
                                                 const std::vector<Eigen::Matrix2cd>& unitaries);

/// Conditional mean mu_U = sum_{s,t} f(s,t) p(s) q(t) for the unique kernel.
double conditional_mean(const std::vector<double>& p, const std::vector<double>& q, int n);

}  // namespace dipe::protocol
