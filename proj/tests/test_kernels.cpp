#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dipe/kernels.hpp"
#include "dipe/states.hpp"
#include "test_helpers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace dipe;
using namespace dipe::kernels;

namespace {

Kernel random_table(int n, std::uint64_t seed) {
  SplitMix64 rng(seed, {0x6b6bu});
  std::vector<double> t(std::size_t{1} << (2 * n));
  for (auto& v : t) v = 2.0 * rng.uniform() - 1.0;
  return Kernel::full_table(n, std::move(t));
}

bool is_unit_last_sector(const std::vector<double>& alpha, double tol = 1e-9) {
  for (std::size_t k = 0; k + 1 < alpha.size(); ++k)
    if (std::abs(alpha[k]) > tol) return false;
  return std::abs(alpha.back() - 1.0) <= tol;
}

// exact V[X_M] for an arbitrary kernel under the Clifford ensemble by
// enumerating the 6^n signed Pauli-basis classes (test oracle)
double exact_block_variance_clifford(const Kernel& f, const qcore::DensityOperator& rho,
                                     const qcore::DensityOperator& sigma, int n_m) {
  const int n = f.n;
  const std::int64_t dim = std::int64_t{1} << n;
  int combos = 1;
  for (int q = 0; q < n; ++q) combos *= 6;

  double mean = 0.0, e2 = 0.0;
  for (int combo = 0; combo < combos; ++combo) {
    std::vector<ComplexMatrix> projs(n);
    int rem = combo;
    std::vector<int> letter(n), sign(n);
    for (int q = 0; q < n; ++q) {
      letter[q] = rem % 3 + 1;
      sign[q] = (rem / 3) % 2 ? -1 : 1;
      rem /= 6;
    }
    auto prob = [&](const qcore::DensityOperator& st, std::int64_t outcome) {
      ComplexMatrix proj = ComplexMatrix::Identity(1, 1);
      for (int q = 0; q < n; ++q) {
        const double s = (qcore::basis_bit(outcome, n, q) ? -1.0 : 1.0) * sign[q];
        proj = qcore::tensor(
            proj, (0.5 * (ComplexMatrix::Identity(2, 2) + s * qcore::pauli_matrix_1q(letter[q])))
                      .eval());
      }
      return (proj * st.matrix).trace().real();
    };
    std::vector<double> p(dim), q(dim);
    for (std::int64_t s = 0; s < dim; ++s) {
      p[s] = prob(rho, s);
      q[s] = prob(sigma, s);
    }
    double mu = 0.0, ef2 = 0.0, xi1 = 0.0, xi2 = 0.0;
    for (std::int64_t t = 0; t < dim; ++t) {
      double row = 0.0;
      for (std::int64_t s = 0; s < dim; ++s) {
        const double fv = f.value(static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(t));
        mu += fv * p[s] * q[t];
        ef2 += fv * fv * p[s] * q[t];
        row += fv * p[s];
      }
      xi1 += q[t] * row * row;
    }
    for (std::int64_t s = 0; s < dim; ++s) {
      double col = 0.0;
      for (std::int64_t t = 0; t < dim; ++t)
        col += f.value(static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(t)) * q[t];
      xi2 += p[s] * col * col;
    }
    const double nm = n_m;
    const double ex2 = ef2 / (nm * nm) + (nm - 1.0) / (nm * nm) * (xi1 + xi2) +
                       ((nm - 1.0) / nm) * ((nm - 1.0) / nm) * mu * mu;
    mean += mu;
    e2 += ex2;
  }
  mean /= combos;
  e2 /= combos;
  return e2 - mean * mean;
}

}  // namespace

TEST_CASE("full tables are capped") {
  CHECK_THROWS_AS(Kernel::full_table(7, std::vector<double>(16)), std::invalid_argument);
  CHECK_THROWS_AS(Kernel::full_table(2, std::vector<double>(15)), std::invalid_argument);
}

TEST_CASE("unique kernel values") {
  CHECK(unique_kernel_value(2, 0b00, 0b00) == 4.0);
  CHECK(unique_kernel_value(2, 0b00, 0b01) == -2.0);
  CHECK(unique_kernel_value(3, 0b000, 0b111) == -1.0);
  // product form
  for (std::uint32_t s = 0; s < 8; ++s)
    for (std::uint32_t t = 0; t < 8; ++t) {
      double prod = 1.0;
      for (int q = 0; q < 3; ++q)
        prod *= (((s >> q) & 1) == ((t >> q) & 1)) ? 2.0 : -1.0;
      CHECK(unique_kernel_value(3, s, t) == prod);
    }
}

TEST_CASE("krawtchouk values") {
  for (int n = 1; n <= 6; ++n)
    for (int k = 0; k <= n; ++k) CHECK(krawtchouk(0, k, n) == 1);
  // K_d(0) = 2^d C(n,d)
  auto binom = [](int n, int k) {
    std::int64_t r = 1;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
  };
  for (int n = 1; n <= 6; ++n)
    for (int d = 0; d <= n; ++d)
      CHECK(krawtchouk(d, 0, n) == (std::int64_t{1} << d) * binom(n, d));
  CHECK_THROWS_AS(krawtchouk(4, 0, 3), std::invalid_argument);
}

TEST_CASE("unique kernel sector vector is exactly (0,...,0,1)") {
  for (int n = 1; n <= 8; ++n) {
    std::vector<std::int64_t> g(n + 1);
    for (int d = 0; d <= n; ++d) g[d] = ((d & 1) ? -1 : 1) * (std::int64_t{1} << (n - d));
    const auto num = swap_sector_numerators(g, n);
    std::int64_t p3 = 1;
    for (int i = 0; i < n; ++i) p3 *= 3;
    for (int k = 0; k < n; ++k) CHECK(num[k] == 0);
    CHECK(num[n] == p3);
  }
}

TEST_CASE("sector coefficients of reference profiles") {
  // g == 1: alpha = (1, 0, ..., 0)
  for (int n = 2; n <= 5; ++n) {
    auto alpha = swap_sector_coefficients(Kernel::hamming_profile(n, std::vector<double>(n + 1, 1.0)));
    CHECK(alpha[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 1; k <= n; ++k) CHECK(std::abs(alpha[k]) < 1e-12);
  }
  // g = a + b (-1)^d 2^{n-d}: alpha = (a, 0, ..., 0, b)
  for (int n = 2; n <= 6; ++n) {
    const double a = 0.7, b = -1.3;
    std::vector<double> g(n + 1);
    for (int d = 0; d <= n; ++d) g[d] = a + b * ((d & 1) ? -1.0 : 1.0) * std::ldexp(1.0, n - d);
    auto alpha = swap_sector_coefficients(Kernel::hamming_profile(n, g));
    CHECK(alpha[0] == doctest::Approx(a).epsilon(1e-12));
    CHECK(alpha[n] == doctest::Approx(b).epsilon(1e-12));
    for (int k = 1; k < n; ++k) CHECK(std::abs(alpha[k]) < 1e-10);
  }
}

TEST_CASE("krawtchouk transform round trip") {
  for (int n = 1; n <= 6; ++n) {
    SplitMix64 rng(40 + n, {0x5u});
    std::vector<double> g(n + 1);
    for (auto& v : g) v = static_cast<double>(static_cast<int>(rng.uniform_int(21)) - 10);
    auto alpha = swap_sector_coefficients(Kernel::hamming_profile(n, g));
    auto back = profile_from_sectors(alpha, n);
    for (int d = 0; d <= n; ++d) CHECK(back[d] == doctest::Approx(g[d]).epsilon(1e-8));
  }
}

TEST_CASE("hamming symmetrize") {
  // fixed point on an already-symmetric table
  {
    const int n = 2;
    std::vector<double> t(16);
    for (std::uint32_t s = 0; s < 4; ++s)
      for (std::uint32_t u = 0; u < 4; ++u) t[(s << 2) | u] = 3.0 - __builtin_popcount(s ^ u);
    auto g = hamming_symmetrize(Kernel::full_table(n, t));
    CHECK(g.profile[0] == doctest::Approx(3.0));
    CHECK(g.profile[1] == doctest::Approx(2.0));
    CHECK(g.profile[2] == doctest::Approx(1.0));
  }
  // n=1 orbit average
  {
    auto g = hamming_symmetrize(Kernel::full_table(1, {3.0, 1.0, 1.0, 7.0}));
    CHECK(g.profile[0] == doctest::Approx(5.0));
    CHECK(g.profile[1] == doctest::Approx(1.0));
  }
  // group enumeration equals Hamming-class average (random tables, n <= 3)
  for (int n = 2; n <= 3; ++n) {
    Kernel f = random_table(n, 70 + n);
    auto via_group = hamming_symmetrize(f);  // n <= 3 uses the explicit group
    const std::uint32_t dim = 1u << n;
    std::vector<double> acc(n + 1, 0.0);
    std::vector<int> cnt(n + 1, 0);
    for (std::uint32_t s = 0; s < dim; ++s)
      for (std::uint32_t t = 0; t < dim; ++t) {
        const int d = __builtin_popcount(s ^ t);
        acc[d] += f.value(s, t);
        ++cnt[d];
      }
    for (int d = 0; d <= n; ++d)
      CHECK(via_group.profile[d] == doctest::Approx(acc[d] / cnt[d]).epsilon(1e-11));
  }
}

TEST_CASE("averaged omega equals the register swap for the unique kernel") {
  for (int n = 1; n <= 2; ++n) {
    auto uk = unique_kernel(n);
    auto sw = register_swap(n);
    CHECK((averaged_omega(uk, Ensemble::kClifford) - sw).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((averaged_omega(uk, Ensemble::kHaar) - sw).cwiseAbs().maxCoeff() < 1e-10);
  }
  // constant kernel sums the POVM to the identity
  auto k1 = Kernel::hamming_profile(1, {1.0, 1.0});
  CHECK((averaged_omega(k1, Ensemble::kClifford) - ComplexMatrix::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("estimator-level unbiasedness of the unique kernel") {
  for (int n = 1; n <= 2; ++n) {
    auto omega = averaged_omega(unique_kernel(n), Ensemble::kClifford);
    for (int rep = 0; rep < 20; ++rep) {
      auto rho = testing::random_mixed(n, 500 + rep);
      auto sigma = testing::random_mixed(n, 900 + rep);
      const double lhs =
          (omega * qcore::tensor(rho.matrix, sigma.matrix)).trace().real();
      CHECK(lhs == doctest::Approx(qcore::inner_product(rho, sigma)).epsilon(1e-10));
    }
  }
}

TEST_CASE("unbiasedness and the sector criterion") {
  // Hamming kernels: full equivalence
  for (int n = 1; n <= 2; ++n) {
    SplitMix64 rng(7u + n, {0x77u});
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<double> g(n + 1);
      for (auto& v : g) v = 2.0 * rng.uniform() - 1.0;
      Kernel k = Kernel::hamming_profile(n, g);
      const bool unbiased =
          (averaged_omega(k, Ensemble::kClifford) - register_swap(n)).cwiseAbs().maxCoeff() < 1e-10;
      CHECK(unbiased == is_unit_last_sector(swap_sector_coefficients(k), 1e-10));
    }
    // the unique kernel itself
    CHECK(is_unit_last_sector(swap_sector_coefficients(unique_kernel(n))));
  }
  // full tables: omega = F implies the sector criterion on the symmetrization
  for (int n = 1; n <= 2; ++n) {
    const std::uint32_t dim = 1u << n;
    std::vector<double> t(std::size_t{1} << (2 * n));
    for (std::uint32_t s = 0; s < dim; ++s)
      for (std::uint32_t u = 0; u < dim; ++u) t[(s << n) | u] = unique_kernel_value(n, s, u);
    Kernel k = Kernel::full_table(n, t);
    REQUIRE((averaged_omega(k, Ensemble::kClifford) - register_swap(n)).cwiseAbs().maxCoeff() <
            1e-10);
    CHECK(is_unit_last_sector(swap_sector_coefficients(hamming_symmetrize(k))));
  }
  // random tables: a failed sector criterion comes with a biased operator
  for (int rep = 0; rep < 10; ++rep) {
    Kernel k = random_table(2, 1000 + rep);
    const bool sector_ok = is_unit_last_sector(swap_sector_coefficients(hamming_symmetrize(k)));
    const bool unbiased =
        (averaged_omega(k, Ensemble::kClifford) - register_swap(2)).cwiseAbs().maxCoeff() < 1e-10;
    if (!sector_ok) CHECK_FALSE(unbiased);
  }
}

TEST_CASE("symmetrization does not increase the worst-case block variance") {
  // grid closed under the bit-flip/permutation unitaries so the orbit
  // argument applies exactly to the finite sup
  const int n = 2;
  std::vector<qcore::DensityOperator> grid;
  auto extend_orbit = [&](const qcore::DensityOperator& rho) {
    const ComplexMatrix x = qcore::pauli_matrix_1q(qcore::kX);
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    std::vector<ComplexMatrix> flips = {qcore::tensor(i2, i2), qcore::tensor(x, i2),
                                        qcore::tensor(i2, x), qcore::tensor(x, x)};
    const ComplexMatrix sw = kernels::register_swap(1);
    for (const auto& fl : flips)
      for (int do_swap = 0; do_swap < 2; ++do_swap) {
        ComplexMatrix w = do_swap ? ComplexMatrix(sw * fl) : fl;
        grid.emplace_back(n, ComplexMatrix(w * rho.matrix * w.adjoint()));
      }
  };
  extend_orbit(testing::random_mixed(2, 31));
  extend_orbit(qcore::DensityOperator(states::make_ghz(2)));
  extend_orbit(qcore::DensityOperator(states::make_w(2)));

  for (int rep = 0; rep < 5; ++rep) {
    Kernel f = random_table(2, 4000 + rep);
    Kernel fs = hamming_symmetrize(f);
    for (int n_m : {1, 2}) {
      double sup_f = -1e300, sup_fs = -1e300;
      for (const auto& rho : grid)
        for (const auto& sigma : grid) {
          sup_f = std::max(sup_f, exact_block_variance_clifford(f, rho, sigma, n_m));
          sup_fs = std::max(sup_fs, exact_block_variance_clifford(fs, rho, sigma, n_m));
        }
      CHECK(sup_fs <= sup_f + 1e-10);
    }
  }
}
