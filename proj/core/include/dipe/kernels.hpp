#pragma once

#include "dipe/qcore.hpp"

#include <cstdint>
#include <vector>

namespace dipe::kernels {

enum class Ensemble { kClifford, kHaar };

/// Post-processing kernel f(s,t), either as a full 4^n table (index s·2^n+t)
/// or as a Hamming-distance profile g(0..n).
struct Kernel {
  int n = 0;
  bool is_profile = false;
  std::vector<double> table;    // 4^n entries when !is_profile
  std::vector<double> profile;  // n+1 entries when is_profile

  static Kernel full_table(int n, std::vector<double> values);
  static Kernel hamming_profile(int n, std::vector<double> g);

  double value(std::uint32_t s, std::uint32_t t) const;
};

/// Table cap for FullTable kernels (4^n entries).
inline constexpr int kTableCap = 6;

/// The unique unbiased Hamming kernel (-1)^D 2^{n-D} = prod(3 delta - 1).
double unique_kernel_value(int n, std::uint32_t s, std::uint32_t t);
Kernel unique_kernel(int n);

/// Orbit average over simultaneous bit relabelings and qubit permutations.
/// Explicit group enumeration for n <= 3, Hamming-class average above.
Kernel hamming_symmetrize(const Kernel& f);

/// q=3 Krawtchouk value K_d(k; n, 3), exact integer arithmetic.
std::int64_t krawtchouk(int d, int k, int n);

/// alpha_k(g) = 3^{-n} sum_d g(d) K_d(k;n,3) for k = 0..n.
std::vector<double> swap_sector_coefficients(const Kernel& g);
/// Exact numerators 3^n·alpha_k for an integer-valued profile.
std::vector<std::int64_t> swap_sector_numerators(const std::vector<std::int64_t>& g, int n);

/// Recover g from alpha by linear solve (round-trip check support).
std::vector<double> profile_from_sectors(const std::vector<double>& alpha, int n);

/// Exact ensemble average E_U[(U† ⊗ U†) Omega_f (U ⊗ U)] on the 4^n-dim
/// bipartite space (A-register qubits first, then B). Clifford enumerates
/// the 6^n signed Pauli-basis classes; Haar uses the exact one-qubit
/// second-moment formula E[A ⊗ A] = (2F - I)/3. Requires n <= 2.
ComplexMatrix averaged_omega(const Kernel& f, Ensemble ensemble);

/// Full swap between the two n-qubit registers of (C^{2^n})^{⊗2}.
ComplexMatrix register_swap(int n);

}  // namespace dipe::kernels
