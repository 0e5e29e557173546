#include "tmsat/mub.hpp"

#include <complex>
#include <string>

#include "tmsat/constants.hpp"
#include "tmsat/error.hpp"

namespace tmsat {

namespace {

using Complex = std::complex<double>;

// Elements of GF(p^m) as base-p digit vectors packed into an integer
// (digit i = coefficient of x^i), reduced by a fixed irreducible polynomial.
struct FiniteField {
  int p;
  int m;
  std::vector<int> modulus;  // monic, coefficients of x^0..x^(m-1) of x^m

  int size() const {
    int q = 1;
    for (int i = 0; i < m; ++i) q *= p;
    return q;
  }
  std::vector<int> digits(int a) const {
    std::vector<int> out(m);
    for (int i = 0; i < m; ++i, a /= p) out[i] = a % p;
    return out;
  }
  int pack(const std::vector<int>& dg) const {
    int a = 0;
    for (int i = m - 1; i >= 0; --i) a = a * p + ((dg[i] % p) + p) % p;
    return a;
  }
  int add(int a, int b) const {
    auto x = digits(a);
    const auto y = digits(b);
    for (int i = 0; i < m; ++i) x[i] = (x[i] + y[i]) % p;
    return pack(x);
  }
  int mul(int a, int b) const {
    const auto x = digits(a);
    const auto y = digits(b);
    std::vector<int> prod(2 * m - 1, 0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) prod[i + j] = (prod[i + j] + x[i] * y[j]) % p;
    // x^m = -modulus
    for (int k = 2 * m - 2; k >= m; --k) {
      const int c = prod[k];
      if (c == 0) continue;
      prod[k] = 0;
      for (int i = 0; i < m; ++i) prod[k - m + i] = ((prod[k - m + i] - c * modulus[i]) % p + p) % p;
    }
    prod.resize(m);
    return pack(prod);
  }
  int pow_p(int a) const {
    int r = 1;
    for (int i = 0; i < p; ++i) r = mul(r, a);
    return r;
  }
  // Absolute trace to GF(p), returned as an integer in [0, p).
  int trace(int a) const {
    int acc = 0;
    int t = a;
    for (int i = 0; i < m; ++i) {
      acc = add(acc, t);
      t = pow_p(t);
    }
    return digits(acc)[0];
  }
};

FiniteField field_for(int d) {
  switch (d) {
    case 2: return {2, 1, {0}};
    case 3: return {3, 1, {0}};
    case 4: return {2, 2, {1, 1}};     // x^2 + x + 1
    case 5: return {5, 1, {0}};
    case 7: return {7, 1, {0}};
    case 8: return {2, 3, {1, 1, 0}};  // x^3 + x + 1
    case 9: return {3, 2, {1, 0}};     // x^2 + 1
    default: break;
  }
  throw Error(ErrorKind::UnsupportedDimension, "no MUB construction for d = " + std::to_string(d));
}

MubSet odd_characteristic(const FiniteField& f) {
  const int q = f.size();
  MubSet set{q, {Eigen::MatrixXcd::Identity(q, q)}};
  const double norm = 1.0 / std::sqrt(static_cast<double>(q));
  for (int a = 0; a < q; ++a) {
    Eigen::MatrixXcd basis(q, q);
    for (int k = 0; k < q; ++k) {
      for (int j = 0; j < q; ++j) {
        const int arg = f.add(f.mul(a, f.mul(j, j)), f.mul(k, j));
        basis(j, k) = std::polar(norm, kTwoPi * f.trace(arg) / f.p);
      }
    }
    set.bases.push_back(std::move(basis));
  }
  return set;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Hermitian Pauli i^(u.v) X^u Z^v on m qubits; qubit i is bit i of the index.
Eigen::MatrixXcd pauli(const std::vector<int>& u, const std::vector<int>& v) {
  Eigen::MatrixXcd x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  int dot = 0;
  for (int i = static_cast<int>(u.size()) - 1; i >= 0; --i) {
    Eigen::MatrixXcd factor = Eigen::MatrixXcd::Identity(2, 2);
    if (u[i]) factor = x * factor;
    if (v[i]) factor = factor * z;
    dot += u[i] * v[i];
    out = kron(out, factor);
  }
  const Complex phase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return phase[dot % 4] * out;
}

// Each basis is the joint eigenbasis of m commuting Paulis X^u Z^(M_a u),
// with (M_a u)_i = tr(a * u * x^i) over GF(2^m).
MubSet even_characteristic(const FiniteField& f) {
  const int q = f.size();
  MubSet set{q, {Eigen::MatrixXcd::Identity(q, q)}};
  for (int a = 0; a < q; ++a) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(q, q);
    for (int g = 0; g < f.m; ++g) {
      std::vector<int> u(f.m, 0);
      u[g] = 1;
      const int ue = f.pack(u);
      std::vector<int> v(f.m);
      int xi = 1;
      for (int i = 0; i < f.m; ++i) {
        v[i] = f.trace(f.mul(a, f.mul(ue, xi)));
        xi = f.mul(xi, 2);  // multiply by x
      }
      h += static_cast<double>(1 << g) * pauli(u, v);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    set.bases.push_back(eig.eigenvectors());
  }
  return set;
}

}  // namespace

bool mub_supported(int d) noexcept {
  return d == 2 || d == 3 || d == 4 || d == 5 || d == 7 || d == 8 || d == 9;
}

MubSet build_mubs(int d) {
  if (d < 2 || d > 9) throw Error(ErrorKind::OutOfRange, "MUB dimension must lie in [2, 9], got " + std::to_string(d));
  const FiniteField f = field_for(d);
  return f.p == 2 ? even_characteristic(f) : odd_characteristic(f);
}

}  // namespace tmsat
