#include "dipe/stabilizer.hpp"

#include <algorithm>
#include <set>

namespace dipe::moments {

using qcore::PauliString;

StabilizerSupport StabilizerSupport::from_generators(std::vector<PauliString> gens) {
  StabilizerSupport s;
  s.n = static_cast<int>(gens.size());
  for (const auto& g : gens)
    if (g.n != s.n) throw std::invalid_argument("StabilizerSupport: need n generators on n qubits");
  s.generators = std::move(gens);

  const std::size_t total = std::size_t{1} << s.n;
  s.elements.reserve(total);
  for (std::size_t m = 0; m < total; ++m) {
    PauliString e = PauliString::identity(s.n);
    for (int i = 0; i < s.n; ++i)
      if ((m >> i) & 1) e = qcore::pauli_multiply(e, s.generators[i]);
    s.elements.push_back(std::move(e));
  }

  if (!s.all_commute()) throw std::invalid_argument("StabilizerSupport: generators do not commute");
  std::set<std::vector<std::uint8_t>> distinct;
  for (const auto& e : s.elements) distinct.insert(e.letters);
  if (distinct.size() != total)
    throw std::invalid_argument("StabilizerSupport: generators not independent");
  return s;
}

bool StabilizerSupport::all_commute() const {
  for (std::size_t i = 0; i < generators.size(); ++i)
    for (std::size_t j = i + 1; j < generators.size(); ++j)
      if (!qcore::pauli_commute(generators[i], generators[j])) return false;
  return true;
}

qcore::DensityOperator StabilizerSupport::to_density() const {
  const std::int64_t dim = std::int64_t{1} << n;
  ComplexMatrix acc = ComplexMatrix::Zero(dim, dim);
  for (const auto& e : elements) acc += qcore::pauli_matrix(e);
  acc /= static_cast<double>(dim);
  return qcore::DensityOperator(n, std::move(acc));
}

namespace {

PauliString single_site(int n, int q, qcore::PauliLetter l) {
  std::vector<std::uint8_t> letters(n, qcore::kI);
  letters[q] = l;
  return PauliString(n, std::move(letters));
}

}  // namespace

StabilizerSupport StabilizerSupport::from_family(const states::StateFamily& family) {
  using states::FamilyKind;
  const int n = family.n;
  std::vector<PauliString> gens;
  switch (family.kind) {
    case FamilyKind::kProductPlus:
      for (int q = 0; q < n; ++q) gens.push_back(single_site(n, q, qcore::kX));
      break;
    case FamilyKind::kGhz: {
      std::vector<std::uint8_t> xs(n, qcore::kX);
      gens.emplace_back(n, std::move(xs));
      for (int q = 0; q + 1 < n; ++q) {
        std::vector<std::uint8_t> ls(n, qcore::kI);
        ls[q] = qcore::kZ;
        ls[q + 1] = qcore::kZ;
        gens.emplace_back(n, std::move(ls));
      }
      break;
    }
    case FamilyKind::kBellDimer: {
      for (int pair = 0; pair + 1 < n; pair += 2) {
        std::vector<std::uint8_t> xx(n, qcore::kI), zz(n, qcore::kI);
        xx[pair] = xx[pair + 1] = qcore::kX;
        zz[pair] = zz[pair + 1] = qcore::kZ;
        gens.emplace_back(n, std::move(xx));
        gens.emplace_back(n, std::move(zz));
      }
      if (n % 2 == 1) gens.push_back(single_site(n, n - 1, qcore::kZ));
      break;
    }
    case FamilyKind::kChainGraph: {
      const int m = family.chain_edges;
      for (int q = 0; q < n; ++q) {
        std::vector<std::uint8_t> ls(n, qcore::kI);
        ls[q] = qcore::kX;
        if (q > 0 && q <= m) ls[q - 1] = qcore::kZ;      // edge (q-1, q) present
        if (q < m) ls[q + 1] = qcore::kZ;                // edge (q, q+1) present
        gens.emplace_back(n, std::move(ls));
      }
      break;
    }
    default:
      throw std::invalid_argument("StabilizerSupport: family is not a stabilizer state");
  }
  return from_generators(std::move(gens));
}

std::vector<StabilizerSupport> enumerate_two_qubit_stabilizers() {
  // Enumerate the 15 maximal isotropic subspaces of F_2^4 as unordered
  // nonidentity commuting pairs {a, b, ab}, then attach the 4 sign choices.
  std::vector<std::vector<std::uint8_t>> letters;
  for (int l0 = 0; l0 < 4; ++l0)
    for (int l1 = 0; l1 < 4; ++l1)
      letters.push_back({static_cast<std::uint8_t>(l0), static_cast<std::uint8_t>(l1)});

  std::set<std::set<std::vector<std::uint8_t>>> seen;
  std::vector<std::pair<PauliString, PauliString>> subspaces;
  for (std::size_t i = 1; i < letters.size(); ++i)
    for (std::size_t j = 1; j < letters.size(); ++j) {
      if (i == j) continue;
      PauliString a(2, letters[i]), b(2, letters[j]);
      if (!qcore::pauli_commute(a, b)) continue;
      PauliString ab = qcore::pauli_multiply(a, b);
      if (ab.is_identity_letters()) continue;
      std::set<std::vector<std::uint8_t>> key{a.letters, b.letters, ab.letters};
      if (seen.insert(key).second) subspaces.emplace_back(a, b);
    }

  auto is_product = [](const PauliString& a, const PauliString& b) {
    // a weight-1 element exists exactly for the product subspaces
    PauliString ab = qcore::pauli_multiply(a, b);
    return a.weight() == 1 || b.weight() == 1 || ab.weight() == 1;
  };

  std::stable_sort(subspaces.begin(), subspaces.end(), [&](const auto& u, const auto& v) {
    return is_product(u.first, u.second) > is_product(v.first, v.second);
  });

  std::vector<StabilizerSupport> out;
  for (const auto& [a, b] : subspaces)
    for (int sa = 0; sa < 2; ++sa)
      for (int sb = 0; sb < 2; ++sb) {
        PauliString ga = a, gb = b;
        ga.sign = sa ? -1 : 1;
        gb.sign = sb ? -1 : 1;
        out.push_back(StabilizerSupport::from_generators({ga, gb}));
      }
  return out;
}

}  // namespace dipe::moments
