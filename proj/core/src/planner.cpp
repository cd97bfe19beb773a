#include "dipe/planner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dipe::planner {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::kCliffordWorstCase: return "clifford";
    case Regime::kHaarComparison: return "haar_comparison";
    case Regime::kHaarConjectured: return "haar_conjectured";
    case Regime::kPauliShadow: return "pauli_shadow";
    case Regime::kStateSpecific: return "state_specific";
  }
  return "?";
}

namespace {

void validate(int n, double eps, double delta) {
  if (n < 1) throw std::invalid_argument("planner: n >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("planner: epsilon in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("planner: delta in (0,1)");
}

std::int64_t checked_ceil(double x) {
  if (!(x < 9.0e18)) throw std::overflow_error("planner: budget exceeds 64-bit range");
  return static_cast<std::int64_t>(std::ceil(x));
}

}  // namespace

PlanResult sufficient_copies(const PlanRequest& req) {
  validate(req.n, req.epsilon, req.delta);
  const int n = req.n;
  double a, b, c_part;
  std::string label;
  switch (req.regime) {
    case Regime::kCliffordWorstCase:
    case Regime::kHaarComparison:
      a = std::pow(3.0, n);
      b = std::pow(1.5, n);
      c_part = 2.0 * std::pow(1.75, n);
      label = "sqrt(4.5^n)";
      break;
    case Regime::kHaarConjectured:
      a = std::pow(3.0, n);
      b = std::pow(1.2, n);
      c_part = 2.0 * std::pow(1.75, n);
      label = "sqrt(3.6^n), conjectured";
      break;
    case Regime::kStateSpecific:
      if (req.a <= 0.0 || req.b <= 0.0)
        throw std::invalid_argument("planner: StateSpecific needs A, B > 0");
      a = req.a;
      b = req.b;
      c_part = req.c;
      label = "state_specific";
      break;
    case Regime::kPauliShadow:
      return shadow_copies(n, req.epsilon, req.delta);
  }

  const double denom = req.delta * req.epsilon * req.epsilon;
  const auto bound_at = [&](std::int64_t n_m) {
    const double nm = static_cast<double>(n_m);
    return (a / nm + c_part + nm * b) / denom;
  };

  const double cont = std::sqrt(a / b);
  std::int64_t lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(cont)));
  std::int64_t hi = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(cont)));

  // pick the candidate with smaller total N = ceil(bound/N_M)·N_M,
  // ties toward smaller N, then smaller N_M
  PlanResult best;
  bool first = true;
  for (std::int64_t n_m : {lo, hi}) {
    const double bnd = bound_at(n_m);
    const std::int64_t n_u = std::max<std::int64_t>(1, checked_ceil(bnd / static_cast<double>(n_m)));
    const std::int64_t total = n_u * n_m;
    if (first || total < best.n_star || (total == best.n_star && n_m < best.n_m_star)) {
      first = false;
      best.n_m_star = n_m;
      best.n_u_star = n_u;
      best.n_star = total;
      best.bound = bnd;
    }
  }

  best.regime = req.regime;
  best.n = n;
  best.n_m_continuous = cont;
  best.scaling_label = label;
  const double nm = static_cast<double>(best.n_m_star);
  best.term_second = a / nm / denom;
  best.term_third = c_part / denom;
  best.term_fourth = nm * b / denom;
  return best;
}

PlanResult shadow_copies(int n, double epsilon, double delta) {
  validate(n, epsilon, delta);
  const double a = std::pow(7.5, n);
  const double b = std::exp2(static_cast<double>(n + 1));
  const double v = delta * epsilon * epsilon;

  // smallest N with a/N² + b/N <= v: root of vN² - bN - a = 0
  const double root = (b + std::sqrt(b * b + 4.0 * a * v)) / (2.0 * v);
  std::int64_t n_star = checked_ceil(root);
  const auto ok = [&](std::int64_t nn) {
    const double x = static_cast<double>(nn);
    return a / (x * x) + b / x <= v;
  };
  while (n_star > 1 && ok(n_star - 1)) --n_star;
  while (!ok(n_star)) ++n_star;

  PlanResult out;
  out.regime = Regime::kPauliShadow;
  out.n = n;
  out.n_m_star = 1;
  out.n_u_star = n_star;
  out.n_star = n_star;
  out.n_m_continuous = 1.0;
  out.bound = root;
  const double x = static_cast<double>(n_star);
  out.term_second = a / (x * x);
  out.term_third = 0.0;
  out.term_fourth = b / x;
  out.scaling_label = "sqrt(7.5^n)";
  out.binding_term = out.term_second >= out.term_fourth ? "second_moment_A" : "one_sided_B";
  return out;
}

std::vector<ScalingRow> scaling_table(int n, double epsilon, double delta) {
  validate(n, epsilon, delta);
  std::vector<ScalingRow> rows;

  ScalingRow prior;
  prior.protocol = "single_qubit_haar_prior";
  prior.base = 6.0;
  prior.attained_by = "not_achievable";
  prior.source = "prior_work";
  prior.numeric = false;
  rows.push_back(prior);

  PlanRequest req;
  req.n = n;
  req.epsilon = epsilon;
  req.delta = delta;

  req.regime = Regime::kCliffordWorstCase;
  PlanResult cl = sufficient_copies(req);
  rows.push_back({"single_qubit_clifford", 4.5, "identical_pure_product_stabilizer",
                  "worst_case_bound", true, cl.n_star});

  req.regime = Regime::kHaarComparison;
  PlanResult hc = sufficient_copies(req);
  rows.push_back({"single_qubit_haar_comparison", 4.5, "not_achievable", "twirl_comparison", true,
                  hc.n_star});

  req.regime = Regime::kHaarConjectured;
  PlanResult hj = sufficient_copies(req);
  rows.push_back({"single_qubit_haar_conjectured", 3.6, "identical_pure_product", "conjectured",
                  true, hj.n_star});

  PlanResult sh = shadow_copies(n, epsilon, delta);
  rows.push_back({"independent_pauli_shadows", 7.5, "identical_pure_product", "worst_case_bound",
                  true, sh.n_star});
  return rows;
}

}  // namespace dipe::planner
