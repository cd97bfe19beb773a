#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dipe::planner {

enum class Regime {
  kCliffordWorstCase,
  kHaarComparison,
  kHaarConjectured,
  kPauliShadow,
  kStateSpecific,
};
std::string to_string(Regime r);

struct PlanRequest {
  int n = 1;
  double epsilon = 0.1;
  double delta = 0.1;
  Regime regime = Regime::kCliffordWorstCase;
  // StateSpecific coefficients (A, B, C); B is the Haar fourth-moment
  // coefficient per the state-dependent certificate.
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

struct PlanResult {
  Regime regime = Regime::kCliffordWorstCase;
  int n = 1;
  std::int64_t n_m_star = 1;       // optimal shots per block
  std::int64_t n_star = 1;         // total copies per party, multiple of n_m_star
  std::int64_t n_u_star = 1;       // blocks, n_star / n_m_star
  double n_m_continuous = 1.0;     // unrounded optimum sqrt(A/B)
  double bound = 0.0;              // Chebyshev sufficient bound at n_m_star
  double term_second = 0.0;        // A/(N_M δ ε²)
  double term_third = 0.0;         // C-part/(δ ε²)
  double term_fourth = 0.0;        // N_M B/(δ ε²)
  std::string scaling_label;
  std::string binding_term;        // PauliShadow: which branch binds
};

/// Chebyshev sufficient-copy budget N >= [A/N_M + C + N_M·B]/(δ ε²) with the
/// discrete N_M minimizer; regimes fix (A, C, B) to their worst-case values.
PlanResult sufficient_copies(const PlanRequest& request);

/// Smallest N with (15/2)^n / N² + 2^{n+1} / N <= δ ε².
PlanResult shadow_copies(int n, double epsilon, double delta);

struct ScalingRow {
  std::string protocol;
  double base = 0.0;            // per-qubit factor under the square root
  std::string attained_by;
  std::string source;
  bool numeric = false;         // explicit Chebyshev bound available
  std::int64_t bound = 0;       // copies at (n, epsilon, delta) when numeric
};

/// The five-row scaling summary, with explicit Chebyshev budgets at the
/// requested (n, epsilon, delta) where constants are known.
std::vector<ScalingRow> scaling_table(int n, double epsilon, double delta);

}  // namespace dipe::planner
