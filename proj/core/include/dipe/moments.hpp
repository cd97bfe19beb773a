#pragma once

#include "dipe/kernels.hpp"
#include "dipe/qcore.hpp"
#include "dipe/stabilizer.hpp"
#include "dipe/states.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace dipe::moments {

using kernels::Ensemble;
using qcore::DensityOperator;

// --- replica operators -------------------------------------------------

/// 2I + F on one qubit pair; eigenvalues {3,3,3,1}.
ComplexMatrix second_moment_operator();

/// Third-moment operators on registers (A,A',B) and (A,B,B'):
///   R_AA'B = -I + (3/2) F_AA' + (1/2) F_AB + (1/2) F_A'B
/// and the primed-B analogue. Both have spectrum {3/2 ×4, 0 ×2, -2 ×2}.
struct ThirdMomentOperators {
  ComplexMatrix r_aab;  // registers (A, A', B)
  ComplexMatrix r_abb;  // registers (A, B, B')
};
ThirdMomentOperators build_third_moment_operators();

/// Single-qubit Clifford fourth-moment operator on replicas (A1,B1,A2,B2):
///   R_4,Cl = -I + (1/2)(F_{A1B1} + F_{A2B2}) + (3/2) Omega_4
/// with Omega_4 = (I^{⊗4} + X^{⊗4} + Y^{⊗4} + Z^{⊗4})/2.
ComplexMatrix build_r4_clifford();

/// Single-qubit Haar fourth-moment operator on replicas (A1,B1,A2,B2),
/// as its permutation-operator expansion.
ComplexMatrix build_r4_haar();

/// Pauli-shadow moment operators: omega_2^P on (A,B) with spectrum
/// {15/2 ×3, 11/2}, omega_3^P on (A,B,B') with spectrum {3/2 ×4, -2 ×2, 0 ×2}.
struct ShadowOperators {
  ComplexMatrix omega2;
  ComplexMatrix omega3;
};
ShadowOperators build_shadow_operators();

/// The six single-qubit Pauli eigenstate projectors, in basis order
/// (Z+, Z-, X+, X-, Y+, Y-).
const std::array<ComplexMatrix, 6>& pauli_eigenstates();

// --- state-dependent coefficients ---------------------------------------

enum class CoeffMethod { kGeneric, kClosedForm, kStabilizer, kProduct, kMonteCarlo };
std::string to_string(CoeffMethod m);
std::string to_string(Ensemble e);

/// Generic caps. B contraction cost grows as nnz^n, so n=4 sits behind an
/// explicit opt-in that also emits a stderr warning.
inline constexpr int kGenericBCap = 3;
inline constexpr int kGenericBCapExtended = 4;
inline constexpr int kTransferCCap = 8;
inline constexpr int kGenericACap = 8;
inline constexpr int kStabilizerCliffordCap = 12;
inline constexpr int kStabilizerHaarCap = 8;

/// A_n = tr[(2I+F)^{⊗n} (rho ⊗ sigma)].
double coeff_A(const DensityOperator& rho, const DensityOperator& sigma);
/// Subsystem-purity form sum_S 2^{n-|S|} tr[psi_S^2] for identical pure pairs.
double coeff_A_purity_form(const qcore::PureState& psi);

/// C_n = tr[R_AA'B^{⊗n}(rho⊗rho⊗sigma)] + tr[R_ABB'^{⊗n}(rho⊗sigma⊗sigma)],
/// evaluated by per-qubit transfer-tensor contraction.
double coeff_C(const DensityOperator& rho, const DensityOperator& sigma);

/// B_{n,E} = tr[R_{4,E}^{⊗n}(rho⊗sigma⊗rho⊗sigma)] by generic contraction of
/// the one-qubit replica tensor against the Pauli coefficient tensors.
double coeff_B(const DensityOperator& rho, const DensityOperator& sigma, Ensemble ensemble,
               bool allow_n4 = false);

/// Fourth moment of a pure stabilizer state via its phase-free support.
/// Clifford: 4^n pair sum over the support with the local kernel
/// kappa in {1,1,3,0}. Haar: support triple sum (see module notes).
double coeff_B_stabilizer(const StabilizerSupport& support, Ensemble ensemble);

/// Closed-form Haar fourth moments for the benchmark families, plus the
/// Clifford product-stabilizer value (3/2)^n.
double closed_form_B(states::FamilyKind family, int n, Ensemble ensemble = Ensemble::kHaar);

/// W-family Haar fourth moment by the active-site expansion
///   B = n^{-4} sum_{r=1}^4 (n)_r (6/5)^{n-r} C_r,
/// with the locked constants C_1 = 6/5, C_2 = 254/25, C_3 = 587/125,
/// C_4 = 1561/2500. Equals closed_form_B(kW, n).
double w_b_haar_active_sites(int n);
/// Closed-form A_n for the benchmark families.
double closed_form_A(states::FamilyKind family, int n);

/// Schmidt-family polynomials in t = lambda(1-lambda):
///   B_2,H = 36/25 - (58/25) t + (236/25) t^2
///   A_2 · B_2,H = 324/25 - (162/5) t + (2588/25) t^2 - (1888/25) t^3
double schmidt_b_haar(double t);
double schmidt_a(double t);
double schmidt_ab_haar(double t);

// --- coefficient facade ---------------------------------------------------

struct CoeffValue {
  double value = 0.0;
  CoeffMethod method = CoeffMethod::kGeneric;
  bool available = false;
  std::string skip_reason;
};

struct CoeffSet {
  int n = 0;
  CoeffValue a, c, b_clifford, b_haar;
};

struct CoeffOptions {
  bool allow_n4 = false;           // extend generic B to n=4
  bool prefer_closed_forms = true;
  bool want_c = true;
};

/// Best-available evaluation of (A, C, B_cl, B_haar) for an identical pair
/// drawn from a named family; uncomputable entries carry a skip reason.
CoeffSet family_coeffs(const states::StateFamily& family, const CoeffOptions& opt = {});

/// Same for an explicit state pair (generic paths only).
CoeffSet pair_coeffs(const DensityOperator& rho, const DensityOperator& sigma,
                     const CoeffOptions& opt = {});

// --- conjecture certificate ------------------------------------------------

struct Certificate {
  int n = 0;
  double product = 0.0;   // A_n · B_{n,H}
  double bound = 0.0;     // (18/5)^n
  double margin = 0.0;    // bound - product
  bool pass = false;
  CoeffMethod method = CoeffMethod::kGeneric;
};

Certificate certificate(const states::StateFamily& family);
Certificate certificate(const DensityOperator& rho, const DensityOperator& sigma,
                        bool allow_n4 = false);

// --- twirl identity ----------------------------------------------------

struct TwirlCheck {
  double max_abs_deviation = 0.0;
  double trace_mc = 0.0;
  double trace_exact = 0.0;
  double plus_value_mc = 0.0;     // tr of the averaged operator on |+><+|^{⊗4}
  double plus_value_exact = 0.0;  // 6/5 from the Haar fourth moment
  std::uint64_t samples = 0;
};

/// Monte Carlo average of (W^{⊗4})† R_4,Cl W^{⊗4} over single-qubit Haar W,
/// compared entrywise against R_4,H.
TwirlCheck verify_twirl_identity(std::uint64_t samples, std::uint64_t seed);

// --- variance assembly ---------------------------------------------------

struct VarianceTerms {
  double v1 = 0.0, v2 = 0.0, v3 = 0.0, v4 = 0.0;
  double total() const { return v1 + v2 + v3 + v4; }
};

/// Four-term block variance from exact coefficients:
///   V = -f^2 + A/N_M^2 + C (N_M-1)/N_M^2 + B ((N_M-1)/N_M)^2.
VarianceTerms variance_terms(double overlap, double a, double c, double b, int n_m);

// --- shadow protocol exact variance ------------------------------------

struct ShadowVariance {
  double a_p = 0.0;       // E tr[rho_hat sigma_hat]^2
  double b_rho_sigma = 0.0;
  double b_sigma_rho = 0.0;
  double variance = 0.0;  // of g_hat at N snapshots per party
};

ShadowVariance shadow_variance_exact(const DensityOperator& rho, const DensityOperator& sigma,
                                     std::int64_t n_snapshots);

// --- transfer tensors (exposed for tests/benchmarks) --------------------

struct TensorEntry3 {
  std::uint8_t a, b, c;
  double w;
};
struct TensorEntry4 {
  std::uint8_t a, b, c, d;
  double w;
};

/// Nonzero entries of tr[R (P_a⊗P_b⊗P_c)]/8 for a one-qubit-triple operator.
std::vector<TensorEntry3> transfer_tensor3(const ComplexMatrix& r);
/// Nonzero entries of tr[R4 (P_a⊗P_b⊗P_c⊗P_d)]/16.
std::vector<TensorEntry4> transfer_tensor4(const ComplexMatrix& r4);

}  // namespace dipe::moments
