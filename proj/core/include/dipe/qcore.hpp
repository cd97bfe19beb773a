#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dipe {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace qcore {

/// Dense-state cap: states larger than 2^kQubitCap amplitudes are refused.
inline constexpr int kQubitCap = 12;
/// Kronecker products are refused beyond this dimension.
inline constexpr std::int64_t kDimCap = std::int64_t{1} << 16;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdFloor = -1e-10;

// Qubit 0 is the leftmost (most significant) tensor factor; basis indices
// read their bit strings most-significant-first, so qubit q owns bit
// (n-1-q) of a basis index.
inline int basis_bit(std::int64_t index, int n, int qubit) {
  return static_cast<int>((index >> (n - 1 - qubit)) & 1);
}

bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);
bool is_unitary(const ComplexMatrix& m, double tol = 1e-10);
/// Smallest eigenvalue of the Hermitian part must clear kPsdFloor.
bool is_positive_semidefinite(const ComplexMatrix& m, double floor = kPsdFloor);

/// Kronecker product, a on the left (most significant factor).
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix tensor_all(const std::vector<ComplexMatrix>& factors);
/// Kronecker power m^{⊗k}.
ComplexMatrix tensor_power(const ComplexMatrix& m, int k);

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b);

/// Normalized n-qubit pure state.
struct PureState {
  int n = 0;
  ComplexVector amplitudes;

  PureState() = default;
  PureState(int n_, ComplexVector amps);

  std::int64_t dim() const { return std::int64_t{1} << n; }
};

/// n-qubit density operator. The constructor enforces Hermiticity and unit
/// trace; positivity is a separate (more expensive) predicate.
struct DensityOperator {
  int n = 0;
  ComplexMatrix matrix;

  DensityOperator() = default;
  DensityOperator(int n_, ComplexMatrix m);
  explicit DensityOperator(const PureState& psi);

  std::int64_t dim() const { return std::int64_t{1} << n; }
  bool is_valid_state(double psd_floor = kPsdFloor) const;
};

/// Hilbert-Schmidt inner product tr[rho sigma] (real for Hermitian inputs).
double inner_product(const DensityOperator& rho, const DensityOperator& sigma);

/// Reduced operator on the qubits listed in `keep` (0-based, strictly
/// increasing order of the retained factors follows `keep`).
ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& keep, int n);
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep);

/// Permutation operator on (C^2)^{⊗m}: basis factor at slot i moves to slot
/// perm[i], so Pi_perm Pi_tau = Pi_{perm∘tau}.
ComplexMatrix permutation_operator(const std::vector<int>& perm);
/// Swap of tensor factors i and j (0-based) among m factors.
ComplexMatrix swap_operator(int m, int i, int j);
/// Conjugates an operator on n qubits by the factor permutation `perm`.
ComplexMatrix permute_qubits(const ComplexMatrix& m, const std::vector<int>& perm);

// --- Pauli strings ---------------------------------------------------------

enum PauliLetter : std::uint8_t { kI = 0, kX = 1, kY = 2, kZ = 3 };

/// Signed n-qubit Pauli string (phase-free letters plus a ±1 sign).
struct PauliString {
  int n = 0;
  std::vector<std::uint8_t> letters;  // one of kI,kX,kY,kZ per qubit
  int sign = +1;

  PauliString() = default;
  PauliString(int n_, std::vector<std::uint8_t> ls, int sign_ = +1);

  static PauliString identity(int n);
  bool is_identity_letters() const;
  int weight() const;

  /// X/Z masks in basis-index bit space (qubit q at bit n-1-q).
  std::uint32_t x_mask() const;
  std::uint32_t z_mask() const;
};

/// Product of two signed Pauli strings. Throws if the result carries an
/// imaginary phase (never happens for commuting Hermitian inputs).
PauliString pauli_multiply(const PauliString& a, const PauliString& b);
bool pauli_commute(const PauliString& a, const PauliString& b);
ComplexMatrix pauli_matrix(const PauliString& p);
const ComplexMatrix& pauli_matrix_1q(int letter);

/// tr[rho P] for a signed Pauli string, O(2^n).
double pauli_expectation(const DensityOperator& rho, const PauliString& p);

/// All 4^n coefficients tr[rho P] over phase-free strings, indexed base-4
/// with qubit 0 as the most significant digit (I,X,Y,Z -> 0,1,2,3).
std::vector<double> pauli_coefficients(const DensityOperator& rho);

/// Letter of flat base-4 Pauli index `idx` at qubit q.
inline int pauli_index_letter(std::int64_t idx, int n, int q) {
  for (int k = n - 1; k > q; --k) idx /= 4;
  return static_cast<int>(idx % 4);
}

ComplexMatrix identity_matrix(std::int64_t dim);

}  // namespace qcore
}  // namespace dipe
