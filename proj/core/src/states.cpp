#include "dipe/states.hpp"

#include <cmath>
#include <sstream>

namespace dipe::states {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, delim)) out.push_back(tok);
  return out;
}

int parse_int(const std::string& s) {
  std::size_t pos = 0;
  const int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("StateFamily: bad integer '" + s + "'");
  return v;
}

double parse_real(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("StateFamily: bad number '" + s + "'");
  return v;
}

}  // namespace

StateFamily StateFamily::parse(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw std::invalid_argument("StateFamily: empty spec");
  const std::string& head = parts[0];
  StateFamily f{};
  auto need = [&](std::size_t k) {
    if (parts.size() != k) throw std::invalid_argument("StateFamily: bad arity in '" + spec + "'");
  };
  if (head == "plusprod") {
    need(2);
    f.kind = FamilyKind::kProductPlus;
    f.n = parse_int(parts[1]);
  } else if (head == "prod") {
    need(4);
    f.kind = FamilyKind::kProductCustom;
    f.n = parse_int(parts[1]);
    f.theta = parse_real(parts[2]);
    f.phi = parse_real(parts[3]);
  } else if (head == "ghz") {
    need(2);
    f.kind = FamilyKind::kGhz;
    f.n = parse_int(parts[1]);
  } else if (head == "w") {
    need(2);
    f.kind = FamilyKind::kW;
    f.n = parse_int(parts[1]);
  } else if (head == "belldimer") {
    need(2);
    f.kind = FamilyKind::kBellDimer;
    f.n = parse_int(parts[1]);
  } else if (head == "haar") {
    if (parts.size() != 2 && parts.size() != 3)
      throw std::invalid_argument("StateFamily: haar:<n>[:<seed>]");
    f.kind = FamilyKind::kHaarRandomPure;
    f.n = parse_int(parts[1]);
    f.seed = parts.size() == 3 ? static_cast<std::uint64_t>(std::stoull(parts[2])) : 0;
  } else if (head == "chain") {
    need(3);
    f.kind = FamilyKind::kChainGraph;
    f.n = parse_int(parts[1]);
    f.chain_edges = parse_int(parts[2]);
    if (f.chain_edges < 0 || f.chain_edges > f.n - 1)
      throw std::invalid_argument("StateFamily: chain edge count out of range");
  } else if (head == "schmidt") {
    need(2);
    f.kind = FamilyKind::kSchmidtPair;
    f.n = 2;
    f.lambda = parse_real(parts[1]);
    if (f.lambda < 0.0 || f.lambda > 1.0)
      throw std::invalid_argument("StateFamily: schmidt lambda out of [0,1]");
  } else if (head == "depol") {
    if (parts.size() < 3) throw std::invalid_argument("StateFamily: depol:<base>:<p>");
    std::string base_spec = parts[1];
    for (std::size_t k = 2; k + 1 < parts.size(); ++k) base_spec += ":" + parts[k];
    f.kind = FamilyKind::kDepolarized;
    f.p = parse_real(parts.back());
    if (f.p < 0.0 || f.p > 1.0) throw std::invalid_argument("StateFamily: depol p out of [0,1]");
    f.base = std::make_shared<StateFamily>(parse(base_spec));
    f.n = f.base->n;
  } else {
    throw std::invalid_argument("StateFamily: unknown family '" + head + "'");
  }
  if (f.n < 1) throw std::invalid_argument("StateFamily: qubit count must be >= 1");
  return f;
}

std::string StateFamily::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case FamilyKind::kProductPlus: os << "plusprod:" << n; break;
    case FamilyKind::kProductCustom: os << "prod:" << n << ":" << theta << ":" << phi; break;
    case FamilyKind::kGhz: os << "ghz:" << n; break;
    case FamilyKind::kW: os << "w:" << n; break;
    case FamilyKind::kBellDimer: os << "belldimer:" << n; break;
    case FamilyKind::kHaarRandomPure: os << "haar:" << n << ":" << seed; break;
    case FamilyKind::kChainGraph: os << "chain:" << n << ":" << chain_edges; break;
    case FamilyKind::kSchmidtPair: os << "schmidt:" << lambda; break;
    case FamilyKind::kDepolarized: os << "depol:" << base->to_string() << ":" << p; break;
  }
  return os.str();
}

bool StateFamily::is_stabilizer() const {
  switch (kind) {
    case FamilyKind::kProductPlus:
    case FamilyKind::kGhz:
    case FamilyKind::kBellDimer:
    case FamilyKind::kChainGraph:
      return true;
    default:
      return false;
  }
}

bool StateFamily::is_pure_product() const {
  switch (kind) {
    case FamilyKind::kProductPlus:
    case FamilyKind::kProductCustom:
      return true;
    case FamilyKind::kGhz:
    case FamilyKind::kW:
      return n == 1;
    case FamilyKind::kBellDimer:
      return n == 1;
    case FamilyKind::kSchmidtPair:
      return lambda == 0.0 || lambda == 1.0;
    case FamilyKind::kChainGraph:
      return chain_edges == 0;
    default:
      return false;
  }
}

DensityOperator StateFamily::make() const {
  switch (kind) {
    case FamilyKind::kProductPlus: return DensityOperator(make_product_plus(n));
    case FamilyKind::kProductCustom: return DensityOperator(make_product_custom(n, theta, phi));
    case FamilyKind::kGhz: return DensityOperator(make_ghz(n));
    case FamilyKind::kW: return DensityOperator(make_w(n));
    case FamilyKind::kBellDimer: return DensityOperator(make_bell_dimer(n));
    case FamilyKind::kHaarRandomPure: return DensityOperator(make_haar_random_pure(n, seed));
    case FamilyKind::kChainGraph: return DensityOperator(make_chain_graph(n, chain_edges));
    case FamilyKind::kSchmidtPair: return DensityOperator(make_schmidt_pair(lambda));
    case FamilyKind::kDepolarized: return depolarize_local(base->make(), p);
  }
  throw std::logic_error("StateFamily: unreachable");
}

PureState make_product_plus(int n) {
  const std::int64_t dim = std::int64_t{1} << n;
  ComplexVector amps = ComplexVector::Constant(dim, std::pow(kInvSqrt2, n));
  return PureState(n, std::move(amps));
}

PureState make_product_custom(int n, double theta, double phi) {
  ComplexVector one(2);
  one << std::cos(theta / 2.0), std::exp(Complex(0, phi)) * std::sin(theta / 2.0);
  ComplexVector amps = one;
  for (int q = 1; q < n; ++q) amps = qcore::tensor(amps, one);
  return PureState(n, std::move(amps));
}

PureState make_ghz(int n) {
  if (n < 1) throw std::invalid_argument("make_ghz: n >= 1");
  const std::int64_t dim = std::int64_t{1} << n;
  ComplexVector amps = ComplexVector::Zero(dim);
  amps(0) = kInvSqrt2;
  amps(dim - 1) = kInvSqrt2;
  return PureState(n, std::move(amps));
}

PureState make_w(int n) {
  if (n < 1) throw std::invalid_argument("make_w: n >= 1");
  const std::int64_t dim = std::int64_t{1} << n;
  ComplexVector amps = ComplexVector::Zero(dim);
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  for (int q = 0; q < n; ++q) amps(std::int64_t{1} << (n - 1 - q)) = a;
  return PureState(n, std::move(amps));
}

PureState make_bell_dimer(int n) {
  if (n < 1) throw std::invalid_argument("make_bell_dimer: n >= 1");
  ComplexVector bell(4);
  bell << kInvSqrt2, 0, 0, kInvSqrt2;
  ComplexVector amps = ComplexVector::Constant(1, 1.0);
  for (int pair = 0; pair < n / 2; ++pair) amps = qcore::tensor(amps, bell);
  if (n % 2 == 1) {
    ComplexVector zero(2);
    zero << 1, 0;
    amps = qcore::tensor(amps, zero);
  }
  return PureState(n, std::move(amps));
}

PureState make_chain_graph(int n, int m) {
  if (m < 0 || m > n - 1) throw std::invalid_argument("make_chain_graph: edge count out of range");
  PureState plus = make_product_plus(n);
  ComplexVector amps = plus.amplitudes;
  // CZ_{j,j+1} flips the sign of amplitudes with both bits set.
  for (int j = 0; j < m; ++j) {
    const std::int64_t bj = std::int64_t{1} << (n - 1 - j);
    const std::int64_t bj1 = std::int64_t{1} << (n - 2 - j);
    for (std::int64_t i = 0; i < amps.size(); ++i)
      if ((i & bj) && (i & bj1)) amps(i) = -amps(i);
  }
  return PureState(n, std::move(amps));
}

PureState make_schmidt_pair(double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("make_schmidt_pair: lambda out of [0,1]");
  ComplexVector amps = ComplexVector::Zero(4);
  amps(0) = std::sqrt(lambda);
  amps(3) = std::sqrt(1.0 - lambda);
  return PureState(2, std::move(amps));
}

PureState make_haar_random_pure(int n, std::uint64_t seed) {
  if (n > qcore::kQubitCap) throw std::invalid_argument("make_haar_random_pure: beyond dense cap");
  SplitMix64 rng(seed, {0x9a11u});
  const std::int64_t dim = std::int64_t{1} << n;
  ComplexVector amps(dim);
  for (std::int64_t i = 0; i < dim; ++i) amps(i) = Complex(rng.gaussian(), rng.gaussian());
  amps /= amps.norm();
  return PureState(n, std::move(amps));
}

DensityOperator depolarize_local(const DensityOperator& rho, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarize_local: p out of [0,1]");
  const int n = rho.n;
  const std::int64_t dim = rho.dim();
  ComplexMatrix m = rho.matrix;
  for (int q = 0; q < n; ++q) {
    // D_p on qubit q: (1-p) m + p (I_q/2 ⊗ tr_q m)
    const std::int64_t bit = std::int64_t{1} << (n - 1 - q);
    ComplexMatrix out = (1.0 - p) * m;
    for (std::int64_t i = 0; i < dim; ++i) {
      for (std::int64_t j = 0; j < dim; ++j) {
        if ((i & bit) != (j & bit)) continue;  // identity block only
        const Complex t = m(i & ~bit, j & ~bit) + m(i | bit, j | bit);
        out(i, j) += p * 0.5 * t;
      }
    }
    m = std::move(out);
  }
  return DensityOperator(n, std::move(m));
}

}  // namespace dipe::states
