#include "dipe/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dipe::kernels {

namespace {

int hamming_distance(std::uint32_t s, std::uint32_t t) {
  return __builtin_popcount(s ^ t);
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

}  // namespace

Kernel Kernel::full_table(int n, std::vector<double> values) {
  if (n > kTableCap) throw std::invalid_argument("Kernel: full table beyond n cap");
  Kernel k;
  k.n = n;
  k.is_profile = false;
  if (values.size() != (std::size_t{1} << (2 * n)))
    throw std::invalid_argument("Kernel: table must have 4^n entries");
  k.table = std::move(values);
  return k;
}

Kernel Kernel::hamming_profile(int n, std::vector<double> g) {
  Kernel k;
  k.n = n;
  k.is_profile = true;
  if (g.size() != static_cast<std::size_t>(n + 1))
    throw std::invalid_argument("Kernel: profile must have n+1 entries");
  k.profile = std::move(g);
  return k;
}

double Kernel::value(std::uint32_t s, std::uint32_t t) const {
  if (is_profile) return profile[hamming_distance(s, t)];
  return table[(static_cast<std::size_t>(s) << n) | t];
}

double unique_kernel_value(int n, std::uint32_t s, std::uint32_t t) {
  const int d = hamming_distance(s, t);
  if (s >= (1u << n) || t >= (1u << n))
    throw std::invalid_argument("unique_kernel_value: string longer than n bits");
  const double mag = std::ldexp(1.0, n - d);
  return (d & 1) ? -mag : mag;
}

Kernel unique_kernel(int n) {
  std::vector<double> g(n + 1);
  for (int d = 0; d <= n; ++d) g[d] = (d & 1) ? -std::ldexp(1.0, n - d) : std::ldexp(1.0, n - d);
  return Kernel::hamming_profile(n, std::move(g));
}

Kernel hamming_symmetrize(const Kernel& f) {
  const int n = f.n;
  const std::uint32_t dim = 1u << n;
  std::vector<double> g(n + 1, 0.0);

  if (f.is_profile) return Kernel::hamming_profile(n, f.profile);

  if (n <= 3) {
    // explicit (S_2)^n ⋊ S_n enumeration
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> acc(n + 1, 0.0);
    std::vector<std::int64_t> count(n + 1, 0);
    do {
      for (std::uint32_t flips = 0; flips < dim; ++flips) {
        auto gamma = [&](std::uint32_t v) {
          std::uint32_t w = 0;
          for (int b = 0; b < n; ++b)
            if ((v >> b) & 1) w |= 1u << perm[b];
          return w ^ flips;
        };
        for (std::uint32_t s = 0; s < dim; ++s)
          for (std::uint32_t t = 0; t < dim; ++t) {
            const int d = hamming_distance(s, t);
            acc[d] += f.value(gamma(s), gamma(t));
            ++count[d];
          }
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (int d = 0; d <= n; ++d) g[d] = acc[d] / static_cast<double>(count[d]);
    return Kernel::hamming_profile(n, std::move(g));
  }

  // Hamming-class average (identical by orbit transitivity)
  std::vector<double> acc(n + 1, 0.0);
  std::vector<std::int64_t> count(n + 1, 0);
  for (std::uint32_t s = 0; s < dim; ++s)
    for (std::uint32_t t = 0; t < dim; ++t) {
      const int d = hamming_distance(s, t);
      acc[d] += f.value(s, t);
      ++count[d];
    }
  for (int d = 0; d <= n; ++d) g[d] = acc[d] / static_cast<double>(count[d]);
  return Kernel::hamming_profile(n, std::move(g));
}

std::int64_t krawtchouk(int d, int k, int n) {
  if (d < 0 || d > n || k < 0 || k > n) throw std::invalid_argument("krawtchouk: index out of range");
  if (n > 30) throw std::invalid_argument("krawtchouk: exact integer path limited to n <= 30");
  std::int64_t acc = 0;
  for (int j = 0; j <= d; ++j) {
    const std::int64_t term = (std::int64_t{1} << (d - j)) * binomial(k, j) * binomial(n - k, d - j);
    acc += (j & 1) ? -term : term;
  }
  return acc;
}

std::vector<std::int64_t> swap_sector_numerators(const std::vector<std::int64_t>& g, int n) {
  if (g.size() != static_cast<std::size_t>(n + 1))
    throw std::invalid_argument("swap_sector_numerators: profile size");
  std::vector<std::int64_t> num(n + 1, 0);
  for (int k = 0; k <= n; ++k)
    for (int d = 0; d <= n; ++d) num[k] += g[d] * krawtchouk(d, k, n);
  return num;
}

std::vector<double> swap_sector_coefficients(const Kernel& g) {
  const Kernel prof = g.is_profile ? g : hamming_symmetrize(g);
  const int n = prof.n;
  double pw = 1.0;
  for (int i = 0; i < n; ++i) pw *= 3.0;
  std::vector<double> alpha(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    double acc = 0.0;
    for (int d = 0; d <= n; ++d) acc += prof.profile[d] * static_cast<double>(krawtchouk(d, k, n));
    alpha[k] = acc / pw;
  }
  return alpha;
}

std::vector<double> profile_from_sectors(const std::vector<double>& alpha, int n) {
  Eigen::MatrixXd K(n + 1, n + 1);
  for (int k = 0; k <= n; ++k)
    for (int d = 0; d <= n; ++d) K(k, d) = static_cast<double>(krawtchouk(d, k, n));
  double pw = 1.0;
  for (int i = 0; i < n; ++i) pw *= 3.0;
  Eigen::VectorXd rhs(n + 1);
  for (int k = 0; k <= n; ++k) rhs(k) = alpha[k] * pw;
  Eigen::VectorXd g = K.fullPivLu().solve(rhs);
  return std::vector<double>(g.data(), g.data() + n + 1);
}

ComplexMatrix register_swap(int n) {
  const std::int64_t dim = std::int64_t{1} << n;
  ComplexMatrix f = ComplexMatrix::Zero(dim * dim, dim * dim);
  for (std::int64_t s = 0; s < dim; ++s)
    for (std::int64_t t = 0; t < dim; ++t) f(t * dim + s, s * dim + t) = 1.0;
  return f;
}

namespace {

// Projector (I + (-1)^bit · sign · P)/2 for basis letter P in {X,Y,Z}.
ComplexMatrix basis_projector(int letter, int sign, int bit) {
  const ComplexMatrix& p = qcore::pauli_matrix_1q(letter);
  const double s = (bit ? -1.0 : 1.0) * sign;
  return 0.5 * (ComplexMatrix::Identity(2, 2) + s * p);
}

}  // namespace

ComplexMatrix averaged_omega(const Kernel& f, Ensemble ensemble) {
  const int n = f.n;
  if (n > 2) throw std::invalid_argument("averaged_omega: supported for n <= 2");
  const std::int64_t dim = std::int64_t{1} << n;
  const std::int64_t big = dim * dim;
  ComplexMatrix omega = ComplexMatrix::Zero(big, big);

  if (ensemble == Ensemble::kClifford) {
    // enumerate signed Pauli-basis classes per qubit: 6^n terms
    const int combos = [&] {
      int c = 1;
      for (int q = 0; q < n; ++q) c *= 6;
      return c;
    }();
    for (int combo = 0; combo < combos; ++combo) {
      std::vector<int> letter(n), sign(n);
      int rem = combo;
      for (int q = 0; q < n; ++q) {
        letter[q] = rem % 3 + 1;  // kX..kZ
        sign[q] = (rem / 3) % 2 ? -1 : 1;
        rem /= 6;
      }
      for (std::int64_t s = 0; s < dim; ++s)
        for (std::int64_t t = 0; t < dim; ++t) {
          const double fv = f.value(static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(t));
          if (fv == 0.0) continue;
          ComplexMatrix proj_s = ComplexMatrix::Identity(1, 1);
          ComplexMatrix proj_t = ComplexMatrix::Identity(1, 1);
          for (int q = 0; q < n; ++q) {
            proj_s = qcore::tensor(proj_s, basis_projector(letter[q], sign[q], qcore::basis_bit(s, n, q)));
            proj_t = qcore::tensor(proj_t, basis_projector(letter[q], sign[q], qcore::basis_bit(t, n, q)));
          }
          omega += fv * qcore::tensor(proj_s, proj_t);
        }
    }
    omega /= static_cast<double>(combos);
    return omega;
  }

  // Haar: per qubit pair, E[P_a(V) ⊗ P_b(V)] = (I + (-1)^{a+b}(2F - I)/3)/4
  const ComplexMatrix swap1 = register_swap(1);
  const ComplexMatrix eye4 = ComplexMatrix::Identity(4, 4);
  const ComplexMatrix m_same = 0.25 * (eye4 + (2.0 * swap1 - eye4) / 3.0);
  const ComplexMatrix m_diff = 0.25 * (eye4 - (2.0 * swap1 - eye4) / 3.0);

  // interleaved order (A_1 B_1 A_2 B_2 ...) -> (A_1..A_n B_1..B_n)
  std::vector<int> perm(2 * n);
  for (int q = 0; q < n; ++q) {
    perm[2 * q] = q;
    perm[2 * q + 1] = n + q;
  }
  for (std::int64_t s = 0; s < dim; ++s)
    for (std::int64_t t = 0; t < dim; ++t) {
      const double fv = f.value(static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(t));
      if (fv == 0.0) continue;
      ComplexMatrix factor = ComplexMatrix::Identity(1, 1);
      for (int q = 0; q < n; ++q) {
        const bool same = qcore::basis_bit(s, n, q) == qcore::basis_bit(t, n, q);
        factor = qcore::tensor(factor, same ? m_same : m_diff);
      }
      omega += fv * qcore::permute_qubits(factor, perm);
    }
  return omega;
}

}  // namespace dipe::kernels
