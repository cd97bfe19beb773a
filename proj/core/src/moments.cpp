#include "dipe/moments.hpp"

#include "dipe/rng.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>

namespace dipe::moments {

using qcore::pauli_matrix_1q;
using qcore::tensor;

namespace {

ComplexMatrix eye(std::int64_t d) { return ComplexMatrix::Identity(d, d); }

// swap of two chosen factors among m qubits
ComplexMatrix f_pair(int m, int i, int j) { return qcore::swap_operator(m, i, j); }

}  // namespace

ComplexMatrix second_moment_operator() {
  return 2.0 * eye(4) + qcore::swap_operator(2, 0, 1);
}

ThirdMomentOperators build_third_moment_operators() {
  ThirdMomentOperators ops;
  // registers (A, A', B) at slots (0, 1, 2)
  ops.r_aab = -eye(8) + 1.5 * f_pair(3, 0, 1) + 0.5 * f_pair(3, 0, 2) + 0.5 * f_pair(3, 1, 2);
  // registers (A, B, B') at slots (0, 1, 2)
  ops.r_abb = -eye(8) + 1.5 * f_pair(3, 1, 2) + 0.5 * f_pair(3, 0, 1) + 0.5 * f_pair(3, 0, 2);
  return ops;
}

ComplexMatrix build_r4_clifford() {
  ComplexMatrix omega4 = ComplexMatrix::Zero(16, 16);
  for (int l = 0; l < 4; ++l) {
    const ComplexMatrix& p = pauli_matrix_1q(l);
    omega4 += tensor(tensor(p, p), tensor(p, p));
  }
  omega4 *= 0.5;
  // replicas (A1, B1, A2, B2) at slots (0, 1, 2, 3)
  return -eye(16) + 0.5 * (f_pair(4, 0, 1) + f_pair(4, 2, 3)) + 1.5 * omega4;
}

ComplexMatrix build_r4_haar() {
  auto perm = [](std::vector<int> p) { return qcore::permutation_operator(p); };
  ComplexMatrix r = ComplexMatrix::Zero(16, 16);
  r += (1.0 / 5.0) * (eye(16) + f_pair(4, 0, 1) + f_pair(4, 2, 3));
  r += (3.0 / 5.0) * (perm({1, 0, 3, 2}) + perm({2, 3, 0, 1}) + perm({3, 2, 1, 0}));
  r -= (3.0 / 10.0) * (f_pair(4, 0, 2) + f_pair(4, 1, 3) + f_pair(4, 0, 3) + f_pair(4, 1, 2));
  return r;
}

const std::array<ComplexMatrix, 6>& pauli_eigenstates() {
  static const std::array<ComplexMatrix, 6> kStates = [] {
    std::array<ComplexMatrix, 6> s;
    auto proj = [](int letter, double sign) -> ComplexMatrix {
      return 0.5 * (eye(2) + sign * pauli_matrix_1q(letter));
    };
    s[0] = proj(qcore::kZ, +1.0);
    s[1] = proj(qcore::kZ, -1.0);
    s[2] = proj(qcore::kX, +1.0);
    s[3] = proj(qcore::kX, -1.0);
    s[4] = proj(qcore::kY, +1.0);
    s[5] = proj(qcore::kY, -1.0);
    return s;
  }();
  return kStates;
}

ShadowOperators build_shadowops_impl() {
  ShadowOperators out;
  out.omega2 = ComplexMatrix::Zero(4, 4);
  out.omega3 = ComplexMatrix::Zero(8, 8);
  const auto& eigs = pauli_eigenstates();
  for (const auto& psi : eigs) {
    const ComplexMatrix e_psi = psi / 3.0;
    const ComplexMatrix s_psi = 3.0 * psi - eye(2);
    for (const auto& phi : eigs) {
      const ComplexMatrix e_phi = phi / 3.0;
      const double t = (s_psi * (3.0 * phi - eye(2))).trace().real();
      out.omega2 += t * t * tensor(e_psi, e_phi);
    }
    out.omega3 += tensor(tensor(e_psi, s_psi), s_psi);
  }
  return out;
}

ShadowOperators build_shadow_operators() {
  static const ShadowOperators kOps = build_shadowops_impl();
  return kOps;
}

std::string to_string(CoeffMethod m) {
  switch (m) {
    case CoeffMethod::kGeneric: return "generic";
    case CoeffMethod::kClosedForm: return "closed_form";
    case CoeffMethod::kStabilizer: return "stabilizer";
    case CoeffMethod::kProduct: return "product";
    case CoeffMethod::kMonteCarlo: return "mc";
  }
  return "?";
}

std::string to_string(Ensemble e) {
  return e == Ensemble::kClifford ? "clifford" : "haar";
}

// --- transfer tensors ------------------------------------------------------

std::vector<TensorEntry3> transfer_tensor3(const ComplexMatrix& r) {
  std::vector<TensorEntry3> out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        const ComplexMatrix p = tensor(tensor(pauli_matrix_1q(a), pauli_matrix_1q(b)), pauli_matrix_1q(c));
        const double w = (r * p).trace().real() / 8.0;
        if (std::abs(w) > 1e-14)
          out.push_back({static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                         static_cast<std::uint8_t>(c), w});
      }
  return out;
}

std::vector<TensorEntry4> transfer_tensor4(const ComplexMatrix& r4) {
  std::vector<TensorEntry4> out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          const ComplexMatrix p =
              tensor(tensor(pauli_matrix_1q(a), pauli_matrix_1q(b)),
                     tensor(pauli_matrix_1q(c), pauli_matrix_1q(d)));
          const double w = (r4 * p).trace().real() / 16.0;
          if (std::abs(w) > 1e-14)
            out.push_back({static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                           static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(d), w});
        }
  return out;
}

namespace {

const std::vector<TensorEntry3>& tensor3_aab() {
  static const auto kT = transfer_tensor3(build_third_moment_operators().r_aab);
  return kT;
}
const std::vector<TensorEntry3>& tensor3_abb() {
  static const auto kT = transfer_tensor3(build_third_moment_operators().r_abb);
  return kT;
}
const std::vector<TensorEntry4>& tensor4(Ensemble e) {
  static const auto kCl = transfer_tensor4(build_r4_clifford());
  static const auto kH = transfer_tensor4(build_r4_haar());
  return e == Ensemble::kClifford ? kCl : kH;
}

// dense per-qubit lookup for the stabilizer triple sum
const std::array<double, 256>& tensor4_dense(Ensemble e) {
  static const auto build = [](Ensemble ens) {
    std::array<double, 256> t{};
    for (const auto& entry : tensor4(ens))
      t[entry.a * 64 + entry.b * 16 + entry.c * 4 + entry.d] = entry.w;
    return t;
  };
  static const std::array<double, 256> kCl = build(Ensemble::kClifford);
  static const std::array<double, 256> kH = build(Ensemble::kHaar);
  return e == Ensemble::kClifford ? kCl : kH;
}

std::int64_t pow_i64(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

// --- coefficients ----------------------------------------------------------

double coeff_A(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.n != sigma.n) throw std::invalid_argument("coeff_A: qubit count mismatch");
  const int n = rho.n;
  if (n > kGenericACap) throw std::invalid_argument("coeff_A: beyond generic cap");
  const auto ra = qcore::pauli_coefficients(rho);
  const auto rb = qcore::pauli_coefficients(sigma);
  // (2I+F) = (5/2) I⊗I + (1/2) sum_{P != I} P⊗P
  const std::int64_t total = pow_i64(4, n);
  double acc = 0.0;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    double w = 1.0;
    std::int64_t rem = idx;
    for (int q = 0; q < n; ++q) {
      w *= (rem % 4 == 0) ? 2.5 : 0.5;
      rem /= 4;
    }
    acc += w * ra[idx] * rb[idx];
  }
  return acc;
}

double coeff_A_purity_form(const qcore::PureState& psi) {
  const int n = psi.n;
  DensityOperator rho(psi);
  double acc = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> keep;
    for (int q = 0; q < n; ++q)
      if ((mask >> q) & 1) keep.push_back(q);
    double purity;
    if (keep.empty()) {
      purity = 1.0;
    } else {
      ComplexMatrix red = qcore::partial_trace(rho.matrix, keep, n);
      purity = (red * red).trace().real();
    }
    acc += std::ldexp(1.0, n - static_cast<int>(keep.size())) * purity;
  }
  return acc;
}

namespace {

// sum over per-qubit entry choices of prod(w) * cA(astr) * cB(bstr) * cC(cstr)
struct Contract3 {
  const std::vector<TensorEntry3>& entries;
  int n;
  const std::vector<double>&ca, &cb, &cc;
  double total = 0.0;

  void walk(int q, double w, std::int64_t ia, std::int64_t ib, std::int64_t ic) {
    if (q == n) {
      total += w * ca[ia] * cb[ib] * cc[ic];
      return;
    }
    for (const auto& e : entries)
      walk(q + 1, w * e.w, ia * 4 + e.a, ib * 4 + e.b, ic * 4 + e.c);
  }
};

double contract3(const std::vector<TensorEntry3>& entries, int n, const std::vector<double>& ca,
                 const std::vector<double>& cb, const std::vector<double>& cc) {
  Contract3 ctx{entries, n, ca, cb, cc};
  ctx.walk(0, 1.0, 0, 0, 0);
  return ctx.total;
}

struct Contract4 {
  const std::vector<TensorEntry4>& entries;
  int n;
  const std::vector<double>&ca, &cb, &cc, &cd;
  double total = 0.0;

  void walk(int q, double w, std::int64_t ia, std::int64_t ib, std::int64_t ic, std::int64_t id) {
    if (q == n) {
      total += w * ca[ia] * cb[ib] * cc[ic] * cd[id];
      return;
    }
    for (const auto& e : entries)
      walk(q + 1, w * e.w, ia * 4 + e.a, ib * 4 + e.b, ic * 4 + e.c, id * 4 + e.d);
  }
};

double contract4(const std::vector<TensorEntry4>& entries, int n, const std::vector<double>& ca,
                 const std::vector<double>& cb, const std::vector<double>& cc,
                 const std::vector<double>& cd) {
  Contract4 ctx{entries, n, ca, cb, cc, cd};
  ctx.walk(0, 1.0, 0, 0, 0, 0);
  return ctx.total;
}

}  // namespace

double coeff_C(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.n != sigma.n) throw std::invalid_argument("coeff_C: qubit count mismatch");
  const int n = rho.n;
  if (n > kTransferCCap) throw std::invalid_argument("coeff_C: beyond transfer cap");
  const auto cr = qcore::pauli_coefficients(rho);
  const auto cs = qcore::pauli_coefficients(sigma);
  const double term_aab = contract3(tensor3_aab(), n, cr, cr, cs);
  const double term_abb = contract3(tensor3_abb(), n, cr, cs, cs);
  return term_aab + term_abb;
}

double coeff_B(const DensityOperator& rho, const DensityOperator& sigma, Ensemble ensemble,
               bool allow_n4) {
  if (rho.n != sigma.n) throw std::invalid_argument("coeff_B: qubit count mismatch");
  const int n = rho.n;
  const int cap = allow_n4 ? kGenericBCapExtended : kGenericBCap;
  if (n > cap) throw std::invalid_argument("coeff_B: beyond generic cap");
  if (allow_n4 && n == kGenericBCapExtended) {
    static std::once_flag warned;
    std::call_once(warned, [] {
      std::fprintf(stderr, "coeff_B: n=4 generic contraction enabled, expect ~seconds\n");
    });
  }
  const auto cr = qcore::pauli_coefficients(rho);
  const auto cs = qcore::pauli_coefficients(sigma);
  // replicas (A1,B1,A2,B2) contract against (rho, sigma, rho, sigma)
  return contract4(tensor4(ensemble), n, cr, cs, cr, cs);
}

double coeff_B_stabilizer(const StabilizerSupport& support, Ensemble ensemble) {
  const int n = support.n;
  const std::size_t size = support.elements.size();

  // packed letters per element
  std::vector<std::vector<std::uint8_t>> letters(size);
  for (std::size_t m = 0; m < size; ++m) letters[m] = support.elements[m].letters;

  if (ensemble == Ensemble::kClifford) {
    if (n > kStabilizerCliffordCap)
      throw std::invalid_argument("coeff_B_stabilizer: beyond Clifford cap");
    // kappa(a,b): 1 if either is I, 3 if equal non-I, 0 otherwise
    static const double kKappa[4][4] = {
        {1, 1, 1, 1}, {1, 3, 0, 0}, {1, 0, 3, 0}, {1, 0, 0, 3}};
    double acc = 0.0;
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j) {
        double w = 1.0;
        for (int q = 0; q < n; ++q) {
          w *= kKappa[letters[i][q]][letters[j][q]];
          if (w == 0.0) break;
        }
        acc += w;
      }
    return acc / std::ldexp(1.0, 2 * n);
  }

  if (n > kStabilizerHaarCap) throw std::invalid_argument("coeff_B_stabilizer: beyond Haar cap");
  // Contributing quadruples (P, Q, R, T) in S^4 must pair positionwise,
  // which forces T = P·Q·R; the element masks compose by XOR. The signed
  // coefficients eps(P)eps(Q)eps(R)eps(T) do NOT cancel in general (mixed
  // per-position pairings pick up Pauli-algebra phases), so they are kept
  // explicitly.
  const auto& t4 = tensor4_dense(Ensemble::kHaar);
  std::vector<double> sign(size);
  for (std::size_t m = 0; m < size; ++m) sign[m] = static_cast<double>(support.elements[m].sign);
  double acc = 0.0;
  for (std::size_t mp = 0; mp < size; ++mp)
    for (std::size_t ma = 0; ma < size; ++ma) {
      const std::size_t mq = mp ^ ma;
      for (std::size_t mb = 0; mb < size; ++mb) {
        const std::size_t mr = mp ^ mb;
        const std::size_t mt = mp ^ ma ^ mb;
        double w = sign[mp] * sign[mq] * sign[mr] * sign[mt];
        for (int q = 0; q < n; ++q) {
          w *= t4[letters[mp][q] * 64 + letters[mq][q] * 16 + letters[mr][q] * 4 + letters[mt][q]];
          if (w == 0.0) break;
        }
        acc += w;
      }
    }
  return acc;
}

double closed_form_A(states::FamilyKind family, int n) {
  using states::FamilyKind;
  switch (family) {
    case FamilyKind::kProductPlus:
    case FamilyKind::kProductCustom:
      return std::pow(3.0, n);
    case FamilyKind::kGhz:
      return (std::pow(3.0, n) + std::pow(2.0, n) + 1.0) / 2.0;
    case FamilyKind::kW:
      return std::pow(3.0, n) * (5.0 * n + 4.0) / (9.0 * n);
    case FamilyKind::kBellDimer:
      return std::pow(7.0, n / 2) * std::pow(3.0, n % 2);
    default:
      throw std::invalid_argument("closed_form_A: no closed form for this family");
  }
}

double closed_form_B(states::FamilyKind family, int n, Ensemble ensemble) {
  using states::FamilyKind;
  if (ensemble == Ensemble::kClifford) {
    if (family == FamilyKind::kProductPlus) return std::pow(1.5, n);
    throw std::invalid_argument("closed_form_B: no Clifford closed form for this family");
  }
  switch (family) {
    case FamilyKind::kProductPlus:
    case FamilyKind::kProductCustom:
      return std::pow(1.2, n);
    case FamilyKind::kGhz:
      return (5.0 / 8.0) * std::pow(6.0 / 5.0, n) + 0.5 * std::pow(4.0 / 5.0, n) +
             0.75 * std::pow(1.0 / 5.0, n) + 0.5 * std::pow(-1.0 / 5.0, n) +
             std::pow(3.0 / 10.0, n) + std::pow(-3.0 / 10.0, n);
    case FamilyKind::kW: {
      const double nn = static_cast<double>(n);
      const double poly = 1561.0 * nn * nn * nn + 4722.0 * nn * nn + 11483.0 * nn - 12582.0;
      return poly / (5184.0 * nn * nn * nn) * std::pow(6.0 / 5.0, n);
    }
    case FamilyKind::kBellDimer:
      return std::pow(29.0 / 20.0, n / 2) * std::pow(6.0 / 5.0, n % 2);
    default:
      throw std::invalid_argument("closed_form_B: no Haar closed form for this family");
  }
}

double w_b_haar_active_sites(int n) {
  if (n < 1) throw std::invalid_argument("w_b_haar_active_sites: n >= 1");
  static constexpr double kSiteConstants[4] = {6.0 / 5.0, 254.0 / 25.0, 587.0 / 125.0,
                                               1561.0 / 2500.0};
  const double nn = static_cast<double>(n);
  double acc = 0.0;
  double falling = 1.0;
  for (int r = 1; r <= 4; ++r) {
    falling *= nn - (r - 1);
    if (falling <= 0.0) break;  // (n)_r vanishes for r > n
    acc += falling * std::pow(6.0 / 5.0, n - r) * kSiteConstants[r - 1];
  }
  return acc / (nn * nn * nn * nn);
}

double schmidt_b_haar(double t) { return 36.0 / 25.0 - (58.0 / 25.0) * t + (236.0 / 25.0) * t * t; }
double schmidt_a(double t) { return 9.0 - 8.0 * t; }
double schmidt_ab_haar(double t) {
  return 324.0 / 25.0 - (162.0 / 5.0) * t + (2588.0 / 25.0) * t * t - (1888.0 / 25.0) * t * t * t;
}

// --- facade ------------------------------------------------------------

namespace {

CoeffValue make_value(double v, CoeffMethod m) {
  CoeffValue cv;
  cv.value = v;
  cv.method = m;
  cv.available = true;
  return cv;
}

CoeffValue skipped(std::string reason) {
  CoeffValue cv;
  cv.available = false;
  cv.skip_reason = std::move(reason);
  return cv;
}

bool has_closed_forms(states::FamilyKind k) {
  using states::FamilyKind;
  return k == FamilyKind::kProductPlus || k == FamilyKind::kProductCustom ||
         k == FamilyKind::kGhz || k == FamilyKind::kW || k == FamilyKind::kBellDimer;
}

// per-qubit factor of an identical pure-product pair, raised to n
CoeffValue product_power(const DensityOperator& one_qubit, int n, Ensemble e) {
  const double b1 = coeff_B(one_qubit, one_qubit, e);
  return make_value(std::pow(b1, n), CoeffMethod::kProduct);
}

}  // namespace

CoeffSet family_coeffs(const states::StateFamily& family, const CoeffOptions& opt) {
  using states::FamilyKind;
  CoeffSet out;
  const int n = family.n;
  out.n = n;

  // A
  if (opt.prefer_closed_forms && has_closed_forms(family.kind) &&
      family.kind != FamilyKind::kProductCustom) {
    out.a = make_value(closed_form_A(family.kind, n), CoeffMethod::kClosedForm);
  } else if (family.kind == FamilyKind::kProductCustom) {
    out.a = make_value(std::pow(3.0, n), CoeffMethod::kProduct);
  } else if (family.kind == FamilyKind::kSchmidtPair) {
    out.a = make_value(schmidt_a(family.lambda * (1.0 - family.lambda)), CoeffMethod::kClosedForm);
  } else if (n <= kGenericACap) {
    const DensityOperator rho = family.make();
    out.a = make_value(coeff_A(rho, rho), CoeffMethod::kGeneric);
  } else {
    out.a = skipped("A: n beyond generic cap and no closed form");
  }

  // C
  if (opt.want_c) {
    if (family.is_pure_product() && family.kind != FamilyKind::kHaarRandomPure &&
        family.kind != FamilyKind::kDepolarized) {
      // both ordered terms give (3/2)^n for identical pure products
      out.c = make_value(2.0 * std::pow(1.5, n), CoeffMethod::kProduct);
    } else if (n <= kTransferCCap) {
      const DensityOperator rho = family.make();
      out.c = make_value(coeff_C(rho, rho), CoeffMethod::kGeneric);
    } else {
      out.c = skipped("C: n beyond transfer-tensor cap");
    }
  }

  // B per ensemble
  auto eval_b = [&](Ensemble e) -> CoeffValue {
    const int generic_cap = opt.allow_n4 ? kGenericBCapExtended : kGenericBCap;
    if (e == Ensemble::kHaar && opt.prefer_closed_forms && has_closed_forms(family.kind))
      return make_value(closed_form_B(family.kind, n, e), CoeffMethod::kClosedForm);
    if (e == Ensemble::kHaar && family.kind == FamilyKind::kSchmidtPair)
      return make_value(schmidt_b_haar(family.lambda * (1.0 - family.lambda)),
                        CoeffMethod::kClosedForm);
    if (family.is_stabilizer()) {
      const int cap = e == Ensemble::kClifford ? kStabilizerCliffordCap : kStabilizerHaarCap;
      if (n <= cap)
        return make_value(coeff_B_stabilizer(StabilizerSupport::from_family(family), e),
                          CoeffMethod::kStabilizer);
    }
    if (family.is_pure_product() && n > generic_cap &&
        family.kind != FamilyKind::kHaarRandomPure && family.kind != FamilyKind::kDepolarized) {
      states::StateFamily one = family;
      one.n = 1;
      if (family.kind == FamilyKind::kChainGraph) one.chain_edges = 0;
      return product_power(one.make(), n, e);
    }
    if (n <= generic_cap) {
      const DensityOperator rho = family.make();
      return make_value(coeff_B(rho, rho, e, opt.allow_n4), CoeffMethod::kGeneric);
    }
    return skipped("B: n beyond generic cap and no fast path for this family/ensemble");
  };
  out.b_clifford = eval_b(Ensemble::kClifford);
  out.b_haar = eval_b(Ensemble::kHaar);
  return out;
}

CoeffSet pair_coeffs(const DensityOperator& rho, const DensityOperator& sigma,
                     const CoeffOptions& opt) {
  CoeffSet out;
  const int n = rho.n;
  out.n = n;
  out.a = n <= kGenericACap ? make_value(coeff_A(rho, sigma), CoeffMethod::kGeneric)
                            : skipped("A: n beyond generic cap");
  if (opt.want_c)
    out.c = n <= kTransferCCap ? make_value(coeff_C(rho, sigma), CoeffMethod::kGeneric)
                               : skipped("C: n beyond transfer-tensor cap");
  const int generic_cap = opt.allow_n4 ? kGenericBCapExtended : kGenericBCap;
  auto eval_b = [&](Ensemble e) -> CoeffValue {
    if (n <= generic_cap)
      return make_value(coeff_B(rho, sigma, e, opt.allow_n4), CoeffMethod::kGeneric);
    return skipped("B: n beyond generic cap");
  };
  out.b_clifford = eval_b(Ensemble::kClifford);
  out.b_haar = eval_b(Ensemble::kHaar);
  return out;
}

Certificate certificate(const states::StateFamily& family) {
  Certificate cert;
  cert.n = family.n;
  cert.bound = std::pow(18.0 / 5.0, family.n);
  const CoeffOptions opt{};
  CoeffSet cs = family_coeffs(family, opt);
  if (!cs.a.available || !cs.b_haar.available)
    throw std::invalid_argument("certificate: coefficients unavailable for this family size");
  cert.product = cs.a.value * cs.b_haar.value;
  cert.method = cs.b_haar.method;
  cert.margin = cert.bound - cert.product;
  cert.pass = cert.product <= cert.bound + 1e-9;
  return cert;
}

Certificate certificate(const DensityOperator& rho, const DensityOperator& sigma, bool allow_n4) {
  Certificate cert;
  cert.n = rho.n;
  cert.bound = std::pow(18.0 / 5.0, rho.n);
  cert.product = coeff_A(rho, sigma) * coeff_B(rho, sigma, Ensemble::kHaar, allow_n4);
  cert.method = CoeffMethod::kGeneric;
  cert.margin = cert.bound - cert.product;
  cert.pass = cert.product <= cert.bound + 1e-9;
  return cert;
}

// --- twirl ---------------------------------------------------------------

TwirlCheck verify_twirl_identity(std::uint64_t samples, std::uint64_t seed) {
  const ComplexMatrix r_cl = build_r4_clifford();
  const ComplexMatrix r_h = build_r4_haar();

  SplitMix64 rng(seed, {0x7717u});
  ComplexMatrix acc = ComplexMatrix::Zero(16, 16);
  Eigen::Matrix2cd w;
  for (std::uint64_t s = 0; s < samples; ++s) {
    // Haar 2x2 via Gram-Schmidt on Gaussian columns
    Complex a(rng.gaussian(), rng.gaussian()), b(rng.gaussian(), rng.gaussian());
    Complex c(rng.gaussian(), rng.gaussian()), d(rng.gaussian(), rng.gaussian());
    Eigen::Vector2cd col0(a, c), col1(b, d);
    col0.normalize();
    col1 -= col0.dot(col1) * col0;
    col1.normalize();
    w.col(0) = col0;
    w.col(1) = col1;
    const ComplexMatrix wm = w;
    ComplexMatrix w2 = tensor(wm, wm);
    ComplexMatrix w4 = tensor(w2, w2);
    acc.noalias() += w4.adjoint() * r_cl * w4;
  }
  acc /= static_cast<double>(samples);

  TwirlCheck out;
  out.samples = samples;
  out.max_abs_deviation = (acc - r_h).cwiseAbs().maxCoeff();
  out.trace_mc = acc.trace().real();
  out.trace_exact = r_h.trace().real();

  ComplexMatrix plus = 0.5 * (eye(2) + pauli_matrix_1q(qcore::kX));
  ComplexMatrix plus2 = tensor(plus, plus);
  ComplexMatrix plus4 = tensor(plus2, plus2);
  out.plus_value_mc = (acc * plus4).trace().real();
  out.plus_value_exact = (r_h * plus4).trace().real();
  return out;
}

// --- variance assembly -----------------------------------------------------

VarianceTerms variance_terms(double overlap, double a, double c, double b, int n_m) {
  if (n_m < 1) throw std::invalid_argument("variance_terms: N_M >= 1");
  VarianceTerms v;
  const double nm = static_cast<double>(n_m);
  v.v1 = -overlap * overlap;
  v.v2 = a / (nm * nm);
  v.v3 = c * (nm - 1.0) / (nm * nm);
  v.v4 = b * ((nm - 1.0) / nm) * ((nm - 1.0) / nm);
  return v;
}

// --- shadow variance ---------------------------------------------------

ShadowVariance shadow_variance_exact(const DensityOperator& rho, const DensityOperator& sigma,
                                     std::int64_t n_snapshots) {
  if (rho.n != sigma.n) throw std::invalid_argument("shadow_variance_exact: qubit count mismatch");
  const int n = rho.n;
  if (n > kTransferCCap) throw std::invalid_argument("shadow_variance_exact: beyond transfer cap");
  const auto ops = build_shadow_operators();

  // omega2 per-qubit-pair tensor: tr[omega2 (P_a ⊗ P_b)]/4
  std::vector<TensorEntry3> t2;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double w = (ops.omega2 * tensor(pauli_matrix_1q(a), pauli_matrix_1q(b))).trace().real() / 4.0;
      if (std::abs(w) > 1e-14)
        t2.push_back({static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), 0, w});
    }
  const auto t3 = transfer_tensor3(ops.omega3);

  const auto cr = qcore::pauli_coefficients(rho);
  const auto cs = qcore::pauli_coefficients(sigma);

  // the c-register of t2 entries is unused (all zero letters)
  std::vector<double> ones(cr.size(), 1.0);
  const double a_p = contract3(t2, n, cr, cs, ones);

  ShadowVariance out;
  out.a_p = a_p;
  // omega3 registers: (measured state, other, other)
  out.b_rho_sigma = contract3(t3, n, cr, cs, cs);
  out.b_sigma_rho = contract3(t3, n, cs, cr, cr);

  const double f = qcore::inner_product(rho, sigma);
  const double nn = static_cast<double>(n_snapshots);
  out.variance = out.a_p / (nn * nn) + (nn - 1.0) / (nn * nn) * (out.b_rho_sigma + out.b_sigma_rho) -
                 (2.0 * nn - 1.0) / (nn * nn) * f * f;
  return out;
}

}  // namespace dipe::moments
