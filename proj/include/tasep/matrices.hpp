#ifndef TASEP_MATRICES_HPP
#define TASEP_MATRICES_HPP

// Scattering algebra for the two-species process on the 2^N occupation basis.
// A permutation sigma acts through a product of adjacent-exchange factors,
// A_sigma = T_{a_n} ... T_{a_1}, each factor a 4x4 two-particle block S
// embedded by tensor products.  The dense construction here is deliberately
// brute force: it is the oracle against which the closed-form diagonal
// entries (used by the identity checks) are verified.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

#include "tasep/errors.hpp"

namespace tasep::matrices {

using cd = std::complex<double>;

// dense 2^N x 2^N construction is a verification device, not a compute path
inline constexpr int default_dense_cap = 8;

struct SpectralPoint {
  std::vector<cd> xi;

  int size() const { return static_cast<int>(xi.size()); }
};

// sigma as one-line notation over {1..N}; word as exchange positions
// a_1,...,a_n (1-based, a_i in 1..N-1) applied left to right starting from
// the identity arrangement
struct PermutationWord {
  std::vector<int> sigma;
  std::vector<int> word;
};

inline void require_permutation(const std::vector<int>& sigma) {
  const int n = static_cast<int>(sigma.size());
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  for (int v : sigma) {
    if (v < 1 || v > n || seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("sigma is not a permutation of 1..N");
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

inline int inversions(const std::vector<int>& sigma) {
  int inv = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i)
    for (std::size_t j = i + 1; j < sigma.size(); ++j)
      if (sigma[i] > sigma[j]) ++inv;
  return inv;
}

inline int permutation_sign(const std::vector<int>& sigma) {
  return (inversions(sigma) % 2 == 0) ? 1 : -1;
}

// integer powers without pow()'s branch-cut ambiguity
inline cd cpowi(cd z, int e) {
  if (e < 0) return cd(1.0) / cpowi(z, -e);
  cd acc(1.0);
  while (e > 0) {
    if (e & 1) acc *= z;
    z *= z;
    e >>= 1;
  }
  return acc;
}

// basis slot of the labeled state with k leading second-class particles;
// 1-based to match the convention used everywhere in this module's contracts
inline int h_index(int k, int n) {
  if (n < 1 || k < 0 || k > n) throw std::invalid_argument("h_index: need 0 <= k <= N");
  if (k == 0) return 1;
  int h = 1;
  for (int j = 1; j <= k; ++j) h += 1 << (n - j);
  return h;
}

// 4x4 exchange block for the pair (alpha, beta): alpha is the particle on the
// left and beta the one on the right before they swap.  alpha, beta are
// 1-based indices into xi.
inline Eigen::Matrix4cd s_matrix(int alpha, int beta, const SpectralPoint& p) {
  const int n = p.size();
  if (alpha < 1 || alpha > n || beta < 1 || beta > n || alpha == beta)
    throw std::invalid_argument("s_matrix: need distinct 1-based indices into xi");
  const cd xa = p.xi[static_cast<std::size_t>(alpha - 1)];
  const cd xb = p.xi[static_cast<std::size_t>(beta - 1)];
  if (xa == cd(1.0)) throw std::domain_error("s_matrix: xi_alpha = 1 is singular");
  const cd d = -(cd(1.0) - xb) / (cd(1.0) - xa);
  Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
  s(0, 0) = d;
  s(1, 1) = d;
  s(2, 2) = cd(-1.0);
  s(3, 3) = d;
  s(1, 2) = (xb - xa) / (cd(1.0) - xa);
  return s;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// T_l = I_2^{(l-1)} (x) S (x) I_2^{(N-l-1)}
inline Eigen::MatrixXcd t_matrix(int l, int alpha, int beta, int n, const SpectralPoint& p,
                                 int dense_cap = default_dense_cap) {
  if (n < 2 || l < 1 || l > n - 1) throw std::invalid_argument("t_matrix: need 1 <= l <= N-1");
  if (n > dense_cap)
    throw resource_error("t_matrix: dense 2^N construction capped at N = " +
                         std::to_string(dense_cap));
  Eigen::MatrixXcd s = s_matrix(alpha, beta, p);
  if (l > 1) s = kron(Eigen::MatrixXcd::Identity(1 << (l - 1), 1 << (l - 1)), s);
  if (l < n - 1) {
    const int tail = 1 << (n - l - 1);
    s = kron(s, Eigen::MatrixXcd::Identity(tail, tail));
  }
  return s;
}

// bubble-sort word: positions that sort sigma to identity, reversed, so that
// applying them to identity rebuilds sigma; length = inversion count
inline PermutationWord decompose_permutation(const std::vector<int>& sigma) {
  require_permutation(sigma);
  PermutationWord pw;
  pw.sigma = sigma;
  std::vector<int> w = sigma;
  std::vector<int> sorting;
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] > w[i + 1]) {
        std::swap(w[i], w[i + 1]);
        sorting.push_back(static_cast<int>(i) + 1);
        swapped = true;
      }
    }
  }
  pw.word.assign(sorting.rbegin(), sorting.rend());
  return pw;
}

// product A_sigma = T_{a_n} ... T_{a_1}; each factor is instantiated with the
// pair (alpha, beta) that its stage actually interchanges, tracked by
// replaying the word on the identity arrangement
inline Eigen::MatrixXcd a_sigma(const PermutationWord& pw, const SpectralPoint& p,
                                int dense_cap = default_dense_cap) {
  require_permutation(pw.sigma);
  const int n = static_cast<int>(pw.sigma.size());
  if (p.size() != n) throw std::invalid_argument("a_sigma: xi size must equal N");
  if (n > dense_cap)
    throw resource_error("a_sigma: dense 2^N construction capped at N = " +
                         std::to_string(dense_cap));
  const int dim = 1 << n;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(dim, dim);
  std::vector<int> arrangement(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) arrangement[static_cast<std::size_t>(i)] = i + 1;
  for (int a : pw.word) {
    if (a < 1 || a > n - 1) throw std::invalid_argument("a_sigma: word position out of range");
    const int alpha = arrangement[static_cast<std::size_t>(a - 1)];
    const int beta = arrangement[static_cast<std::size_t>(a)];
    acc = t_matrix(a, alpha, beta, n, p, dense_cap) * acc;
    std::swap(arrangement[static_cast<std::size_t>(a - 1)], arrangement[static_cast<std::size_t>(a)]);
  }
  if (arrangement != pw.sigma)
    throw std::invalid_argument("a_sigma: word does not compose to sigma");
  return acc;
}

// diagonal entry [A_sigma]_{h_k,h_k} in closed form; empty products are 1
inline cd a_sigma_diag_closed(const std::vector<int>& sigma, int k, const SpectralPoint& p) {
  require_permutation(sigma);
  const int n = static_cast<int>(sigma.size());
  if (p.size() != n) throw std::invalid_argument("diag closed form: xi size must equal N");
  if (k < 0 || k > n) throw std::invalid_argument("diag closed form: need 0 <= k <= N");
  for (const cd& x : p.xi)
    if (x == cd(1.0)) throw std::domain_error("diag closed form: xi = 1 is singular");
  cd acc(static_cast<double>(permutation_sign(sigma)));
  for (int j = 1; j <= n; ++j) {
    const cd num = cd(1.0) - p.xi[static_cast<std::size_t>(j - 1)];
    const cd den = cd(1.0) - p.xi[static_cast<std::size_t>(sigma[static_cast<std::size_t>(j - 1)] - 1)];
    const int e = (j <= k) ? j - 1 : j - 2;
    acc *= cpowi(num / den, e);
  }
  return acc;
}

}  // namespace tasep::matrices

#endif
