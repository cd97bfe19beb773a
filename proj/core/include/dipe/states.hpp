#pragma once

#include "dipe/qcore.hpp"
#include "dipe/rng.hpp"

#include <memory>
#include <optional>
#include <string>

namespace dipe::states {

using qcore::DensityOperator;
using qcore::PureState;

enum class FamilyKind {
  kProductPlus,
  kProductCustom,
  kGhz,
  kW,
  kBellDimer,
  kHaarRandomPure,
  kChainGraph,
  kDepolarized,
  kSchmidtPair,
};

/// Parsed state-family specification. Text forms accepted by parse():
///   plusprod:<n>            |+>^{⊗n}
///   prod:<n>:<theta>:<phi>  (cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>)^{⊗n}
///   ghz:<n>  w:<n>  belldimer:<n>
///   haar:<n>:<seed>
///   chain:<n>:<m>           CZ chain state, 0 <= m <= n-1
///   schmidt:<lambda>        two-qubit √λ|00> + √(1-λ)|11>
///   depol:<base-spec>:<p>   local depolarization of any base family
struct StateFamily {
  FamilyKind kind;
  int n = 0;
  int chain_edges = 0;      // ChainGraph
  double p = 0.0;           // Depolarized
  double lambda = 0.0;      // SchmidtPair
  double theta = 0.0;       // ProductCustom
  double phi = 0.0;         // ProductCustom
  std::uint64_t seed = 0;   // HaarRandomPure
  std::shared_ptr<StateFamily> base;  // Depolarized

  static StateFamily parse(const std::string& spec);
  std::string to_string() const;

  /// True when the family is a pure stabilizer state (all parameters known).
  bool is_stabilizer() const;
  /// True when the state is a tensor product of identical single-qubit pures.
  bool is_pure_product() const;

  DensityOperator make() const;
};

PureState make_product_plus(int n);
PureState make_product_custom(int n, double theta, double phi);
PureState make_ghz(int n);
PureState make_w(int n);
/// ⌊n/2⌋ Bell pairs; odd n appends a |0⟩ qubit.
PureState make_bell_dimer(int n);
/// (∏_{j=1}^{m} CZ_{j,j+1}) |+>^{⊗n}.
PureState make_chain_graph(int n, int m);
PureState make_schmidt_pair(double lambda);
PureState make_haar_random_pure(int n, std::uint64_t seed);

/// Independent single-qubit depolarizing channel D_p on every qubit,
/// D_p(tau) = (1-p) tau + p tr[tau] I/2.
DensityOperator depolarize_local(const DensityOperator& rho, double p);

}  // namespace dipe::states
