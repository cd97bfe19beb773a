#include "dipe/qcore.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace dipe::qcore {

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  ComplexMatrix d = m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

bool is_positive_semidefinite(const ComplexMatrix& m, double floor) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= floor;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::int64_t rows = a.rows() * b.rows();
  const std::int64_t cols = a.cols() * b.cols();
  if (rows > kDimCap || cols > kDimCap)
    throw std::length_error("tensor: product dimension exceeds cap 2^16");
  ComplexMatrix out(rows, cols);
  for (std::int64_t i = 0; i < a.rows(); ++i)
    for (std::int64_t j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix tensor_all(const std::vector<ComplexMatrix>& factors) {
  if (factors.empty()) return ComplexMatrix::Identity(1, 1);
  ComplexMatrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = tensor(out, factors[k]);
  return out;
}

ComplexMatrix tensor_power(const ComplexMatrix& m, int k) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int i = 0; i < k; ++i) out = tensor(out, m);
  return out;
}

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (std::int64_t i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

PureState::PureState(int n_, ComplexVector amps) : n(n_), amplitudes(std::move(amps)) {
  if (n < 0 || n > kQubitCap) throw std::invalid_argument("PureState: qubit count out of range");
  if (amplitudes.size() != dim()) throw std::invalid_argument("PureState: wrong amplitude count");
  if (std::abs(amplitudes.squaredNorm() - 1.0) > 1e-12)
    throw std::invalid_argument("PureState: not normalized");
}

DensityOperator::DensityOperator(int n_, ComplexMatrix m) : n(n_), matrix(std::move(m)) {
  if (n < 0 || n > kQubitCap) throw std::invalid_argument("DensityOperator: qubit count out of range");
  if (matrix.rows() != dim() || matrix.cols() != dim())
    throw std::invalid_argument("DensityOperator: wrong dimension");
  if (!is_hermitian(matrix, kHermitianTol))
    throw std::invalid_argument("DensityOperator: not Hermitian");
  if (std::abs(matrix.trace().real() - 1.0) > kTraceTol || std::abs(matrix.trace().imag()) > kTraceTol)
    throw std::invalid_argument("DensityOperator: trace != 1");
}

DensityOperator::DensityOperator(const PureState& psi)
    : DensityOperator(psi.n, psi.amplitudes * psi.amplitudes.adjoint()) {}

bool DensityOperator::is_valid_state(double psd_floor) const {
  return is_positive_semidefinite(matrix, psd_floor);
}

double inner_product(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.n != sigma.n) throw std::invalid_argument("inner_product: qubit count mismatch");
  return (rho.matrix.cwiseProduct(sigma.matrix.transpose())).sum().real();
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& keep, int n) {
  const std::int64_t dim = std::int64_t{1} << n;
  if (m.rows() != dim || m.cols() != dim)
    throw std::invalid_argument("partial_trace: dimension mismatch");
  for (int q : keep)
    if (q < 0 || q >= n) throw std::invalid_argument("partial_trace: qubit index out of range");

  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    bool kept = false;
    for (int k : keep) kept = kept || (k == q);
    if (!kept) traced.push_back(q);
  }

  const int nk = static_cast<int>(keep.size());
  const int nt = static_cast<int>(traced.size());
  const std::int64_t dk = std::int64_t{1} << nk;
  const std::int64_t dt = std::int64_t{1} << nt;
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);

  auto compose = [&](std::int64_t kept_bits, std::int64_t traced_bits) {
    std::int64_t idx = 0;
    for (int a = 0; a < nk; ++a)
      if ((kept_bits >> (nk - 1 - a)) & 1) idx |= std::int64_t{1} << (n - 1 - keep[a]);
    for (int a = 0; a < nt; ++a)
      if ((traced_bits >> (nt - 1 - a)) & 1) idx |= std::int64_t{1} << (n - 1 - traced[a]);
    return idx;
  };

  for (std::int64_t i = 0; i < dk; ++i)
    for (std::int64_t j = 0; j < dk; ++j) {
      Complex acc = 0;
      for (std::int64_t t = 0; t < dt; ++t) acc += m(compose(i, t), compose(j, t));
      out(i, j) = acc;
    }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep) {
  return DensityOperator(static_cast<int>(keep.size()),
                         partial_trace(rho.matrix, keep, rho.n));
}

ComplexMatrix permutation_operator(const std::vector<int>& perm) {
  const int m = static_cast<int>(perm.size());
  std::vector<int> seen(m, 0);
  for (int v : perm) {
    if (v < 0 || v >= m || seen[v]) throw std::invalid_argument("permutation_operator: not a permutation");
    seen[v] = 1;
  }
  const std::int64_t dim = std::int64_t{1} << m;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    std::int64_t c = 0;
    // factor at slot i moves to slot perm[i]
    for (int i = 0; i < m; ++i) {
      const std::int64_t bit = (b >> (m - 1 - i)) & 1;
      c |= bit << (m - 1 - perm[i]);
    }
    out(c, b) = 1.0;
  }
  return out;
}

ComplexMatrix swap_operator(int m, int i, int j) {
  if (i < 0 || j < 0 || i >= m || j >= m || i == j)
    throw std::invalid_argument("swap_operator: invalid indices");
  std::vector<int> perm(m);
  for (int k = 0; k < m; ++k) perm[k] = k;
  std::swap(perm[i], perm[j]);
  return permutation_operator(perm);
}

ComplexMatrix permute_qubits(const ComplexMatrix& m, const std::vector<int>& perm) {
  ComplexMatrix p = permutation_operator(perm);
  return p * m * p.adjoint();
}

PauliString::PauliString(int n_, std::vector<std::uint8_t> ls, int sign_)
    : n(n_), letters(std::move(ls)), sign(sign_) {
  if (static_cast<int>(letters.size()) != n)
    throw std::invalid_argument("PauliString: letter count mismatch");
  if (sign != 1 && sign != -1) throw std::invalid_argument("PauliString: sign must be ±1");
  for (auto l : letters)
    if (l > 3) throw std::invalid_argument("PauliString: bad letter");
}

PauliString PauliString::identity(int n) {
  return PauliString(n, std::vector<std::uint8_t>(n, kI), +1);
}

bool PauliString::is_identity_letters() const {
  for (auto l : letters)
    if (l != kI) return false;
  return true;
}

int PauliString::weight() const {
  int w = 0;
  for (auto l : letters) w += (l != kI);
  return w;
}

std::uint32_t PauliString::x_mask() const {
  std::uint32_t m = 0;
  for (int q = 0; q < n; ++q)
    if (letters[q] == kX || letters[q] == kY) m |= 1u << (n - 1 - q);
  return m;
}

std::uint32_t PauliString::z_mask() const {
  std::uint32_t m = 0;
  for (int q = 0; q < n; ++q)
    if (letters[q] == kZ || letters[q] == kY) m |= 1u << (n - 1 - q);
  return m;
}

namespace {

// letter -> (x,z) bits with Y = i·XZ
inline void letter_bits(int l, int& x, int& z) {
  x = (l == kX || l == kY);
  z = (l == kZ || l == kY);
}

inline int bits_letter(int x, int z) {
  if (x && z) return kY;
  if (x) return kX;
  if (z) return kZ;
  return kI;
}

}  // namespace

PauliString pauli_multiply(const PauliString& a, const PauliString& b) {
  if (a.n != b.n) throw std::invalid_argument("pauli_multiply: length mismatch");
  std::vector<std::uint8_t> out(a.n);
  int ipow = 0;  // power of i mod 4
  for (int q = 0; q < a.n; ++q) {
    int xa, za, xb, zb;
    letter_bits(a.letters[q], xa, za);
    letter_bits(b.letters[q], xb, zb);
    // (i^{xa za} X^xa Z^za)(i^{xb zb} X^xb Z^zb)
    //   = i^{xa za + xb zb} (-1)^{za xb} X^{xa+xb} Z^{za+zb}
    const int xc = xa ^ xb, zc = za ^ zb;
    ipow = (ipow + xa * za + xb * zb + 2 * (za & xb) + 4 - xc * zc) & 3;
    out[q] = static_cast<std::uint8_t>(bits_letter(xc, zc));
  }
  int sign = a.sign * b.sign;
  if (ipow == 2) sign = -sign;
  else if (ipow != 0) throw std::domain_error("pauli_multiply: product has imaginary phase");
  return PauliString(a.n, std::move(out), sign);
}

bool pauli_commute(const PauliString& a, const PauliString& b) {
  if (a.n != b.n) throw std::invalid_argument("pauli_commute: length mismatch");
  int sym = 0;
  for (int q = 0; q < a.n; ++q) {
    int xa, za, xb, zb;
    letter_bits(a.letters[q], xa, za);
    letter_bits(b.letters[q], xb, zb);
    sym ^= (xa & zb) ^ (za & xb);
  }
  return sym == 0;
}

const ComplexMatrix& pauli_matrix_1q(int letter) {
  static const ComplexMatrix kMats[4] = {
      (ComplexMatrix(2, 2) << 1, 0, 0, 1).finished(),
      (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished(),
      (ComplexMatrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished(),
      (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished()};
  return kMats[letter];
}

ComplexMatrix pauli_matrix(const PauliString& p) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < p.n; ++q) out = tensor(out, pauli_matrix_1q(p.letters[q]));
  return static_cast<double>(p.sign) * out;
}

double pauli_expectation(const DensityOperator& rho, const PauliString& p) {
  if (p.n != rho.n) throw std::invalid_argument("pauli_expectation: qubit count mismatch");
  const std::int64_t dim = rho.dim();
  const std::uint32_t xm = p.x_mask(), zm = p.z_mask();
  int ny = 0;
  for (auto l : p.letters) ny += (l == kY);
  // P|j> = i^{ny} (-1)^{popcount(j & zm)} |j ^ xm| up to the Y bookkeeping:
  // H = i^{|x∧z|} X^x Z^z with |x∧z| = ny.
  Complex phase_y = std::pow(Complex(0, 1), ny);
  Complex acc = 0;
  for (std::int64_t j = 0; j < dim; ++j) {
    const int zpar = __builtin_popcountll(static_cast<unsigned long long>(j) & zm) & 1;
    const double s = zpar ? -1.0 : 1.0;
    acc += rho.matrix(j, j ^ xm) * s;
  }
  acc *= phase_y * static_cast<double>(p.sign);
  return acc.real();
}

std::vector<double> pauli_coefficients(const DensityOperator& rho) {
  if (rho.n > kQubitCap) throw std::invalid_argument("pauli_coefficients: beyond dense cap");
  const int n = rho.n;
  std::int64_t total = 1;
  for (int q = 0; q < n; ++q) total *= 4;
  std::vector<double> coeffs(total);
  std::vector<std::uint8_t> letters(n, kI);
  for (std::int64_t idx = 0; idx < total; ++idx) {
    std::int64_t rem = idx;
    for (int q = n - 1; q >= 0; --q) {
      letters[q] = static_cast<std::uint8_t>(rem % 4);
      rem /= 4;
    }
    coeffs[idx] = pauli_expectation(rho, PauliString(n, letters));
  }
  return coeffs;
}

ComplexMatrix identity_matrix(std::int64_t dim) { return ComplexMatrix::Identity(dim, dim); }

}  // namespace dipe::qcore
