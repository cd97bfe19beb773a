#pragma once

#include "dipe/qcore.hpp"
#include "dipe/states.hpp"

#include <vector>

namespace dipe::moments {

/// Phase-free stabilizer support of a pure stabilizer state: n independent
/// commuting signed generators and the 2^n signed elements they span.
/// elements[m] is the product of the generators selected by the bits of m,
/// so element masks compose by XOR.
struct StabilizerSupport {
  int n = 0;
  std::vector<qcore::PauliString> generators;
  std::vector<qcore::PauliString> elements;

  static StabilizerSupport from_generators(std::vector<qcore::PauliString> gens);
  static StabilizerSupport from_family(const states::StateFamily& family);

  /// Projector onto the stabilized state, prod (I + g_i)/2.
  qcore::DensityOperator to_density() const;

  bool all_commute() const;
};

/// All 60 two-qubit pure stabilizer states, products first (36), then the
/// 24 maximally entangled ones.
std::vector<StabilizerSupport> enumerate_two_qubit_stabilizers();

}  // namespace dipe::moments
