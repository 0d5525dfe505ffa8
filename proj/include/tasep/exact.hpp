#ifndef TASEP_EXACT_HPP
#define TASEP_EXACT_HPP

// Exact probability formulas, all reduced to determinants or signed sums of
// contour moments I(m, r, t).  Every quantity here has at least two
// independent evaluation routes wired up in the tests (determinant vs
// permutation sum, specialized vs general initial data, formula vs master
// equation), because the reductions from the N-fold contour integrals to
// moment determinants are derivations done in this codebase and have to be
// self-checked rather than trusted.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tasep/bethe.hpp"
#include "tasep/detail/dd.hpp"
#include "tasep/errors.hpp"

namespace tasep::exact {

// permutation-sum routes enumerate N! terms; kept as verification oracles
inline constexpr int default_perm_cap = 9;

struct ExactResult {
  double value = 0.0;        // raw formula value (kept unclamped)
  std::string method;        // "determinant", "perm-sum", or "hankel"
  long moment_evals = 0;     // distinct contour moments computed
  double rcond = -1.0;       // LU reciprocal condition estimate, -1 if n/a

  // probability-valued results may stick out of [0,1] by roundoff only
  double clamped() const { return std::min(1.0, std::max(0.0, value)); }
};

namespace detail_exact {

inline void require_increasing(const std::vector<int>& v, const char* name) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i] >= v[i + 1])
      throw std::invalid_argument(std::string(name) + " must be strictly increasing");
}

inline void require_args(std::size_t n, int k, double t) {
  if (n == 0) throw std::invalid_argument("need at least one particle");
  if (k < 0 || k > static_cast<int>(n)) throw std::invalid_argument("need 0 <= k <= N");
  if (t < 0) throw std::invalid_argument("need t >= 0");
}

// ladder exponents: slot j (1-based) carries j-1 below the species boundary
// and j-2 above it
inline std::vector<int> slot_exponents(int n, int k) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) p[static_cast<std::size_t>(j - 1)] = (j <= k) ? j - 1 : j - 2;
  return p;
}

// weight exponents on (1 - xi) for the event formula rows
inline std::vector<int> row_exponents(int n, int k) {
  std::vector<int> q(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i)
    q[static_cast<std::size_t>(i - 1)] = (i <= k ? 1 : 0) - (n - i) - 1;
  return q;
}

struct DetOutcome {
  double det = 0.0;
  double rcond = -1.0;
};

inline DetOutcome lu_det(const Eigen::MatrixXd& a) {
  if (a.rows() == 1) return {a(0, 0), 1.0};
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  return {lu.determinant(), lu.rcond()};
}

// determinant by partially pivoted elimination carried in double-double;
// destroys a.  Entry magnitudes here reach ~1e4 while route-agreement checks
// ask for 1e-10 absolute on O(1) values, which plain double LU misses at
// N >= 5 (observed 1.3e-10 at N=5, t=2), so only the condition diagnostic
// stays in double.
inline tasep::detail::dd gauss_det_dd(std::vector<std::vector<tasep::detail::dd>>& a) {
  using tasep::detail::dd;
  const int n = static_cast<int>(a.size());
  dd det(1.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    double best = std::abs(a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)].to_double());
    for (int i = c + 1; i < n; ++i) {
      double v = std::abs(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].to_double());
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) return dd(0.0);
    if (piv != c) {
      std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(c)]);
      det = -det;
    }
    auto& row_c = a[static_cast<std::size_t>(c)];
    det = det * row_c[static_cast<std::size_t>(c)];
    for (int i = c + 1; i < n; ++i) {
      auto& row_i = a[static_cast<std::size_t>(i)];
      dd f = row_i[static_cast<std::size_t>(c)] / row_c[static_cast<std::size_t>(c)];
      for (int j = c + 1; j < n; ++j)
        row_i[static_cast<std::size_t>(j)] =
            row_i[static_cast<std::size_t>(j)] - f * row_c[static_cast<std::size_t>(j)];
    }
  }
  return det;
}

// value from the double-double elimination, diagnostic from the double LU
template <typename Entry>
DetOutcome moment_det(int n, Entry&& entry) {
  if (n == 1) return {entry(0, 0).to_double(), 1.0};
  std::vector<std::vector<tasep::detail::dd>> a(static_cast<std::size_t>(n),
                                                std::vector<tasep::detail::dd>(
                                                    static_cast<std::size_t>(n)));
  Eigen::MatrixXd ad(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      tasep::detail::dd v = entry(i, j);
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
      ad(i, j) = v.to_double();
    }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(ad);
  return {gauss_det_dd(a).to_double(), lu.rcond()};
}

// signed sum over all of S_N with caller-supplied per-(slot, value) factor;
// enumeration is lexicographic so the reduction order is fixed
template <typename Factor>
double perm_sum(int n, Factor&& factor) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 1);
  tasep::detail::dd sum(0.0);
  do {
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)]) ++inv;
    tasep::detail::dd term((inv % 2 == 0) ? 1.0 : -1.0);
    for (int i = 0; i < n; ++i)
      term = term * tasep::detail::dd(factor(i, perm[static_cast<std::size_t>(i)]));
    sum = sum + term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum.to_double();
}

inline int hankel_sign(int n) { return ((n * (n - 1) / 2) % 2 == 0) ? 1 : -1; }

// det of the Hankel matrix [I(base + i + j, w, t)]_{i,j=0..n-1} times the
// reversal sign; shared by the step and leftmost-tail formulas
inline ExactResult hankel_form(int n, int base, int w, double t, const bethe::SeriesSpec& spec) {
  bethe::MomentTable moments(t, spec);
  DetOutcome d = moment_det(n, [&](int i, int j) { return moments.at_dd(base + i + j, w); });
  ExactResult res;
  res.value = hankel_sign(n) * d.det;
  res.method = "hankel";
  res.moment_evals = moments.evals();
  res.rcond = d.rcond;
  return res;
}

}  // namespace detail_exact

// default x window for sweeps around the initial block
inline std::pair<int, int> x_sweep_range(int n, double t) {
  const int pad = static_cast<int>(std::ceil(3.0 * t));
  return {1 - pad, 1 + n + pad};
}

// P[(Y, species word with k leading 2s) -> (X, same word)] at time t,
// as the N!-term sum of factorized contour moments
inline ExactResult transition_probability(const std::vector<int>& y, const std::vector<int>& x,
                                          int k, double t, int perm_cap = default_perm_cap,
                                          const bethe::SeriesSpec& spec = {}) {
  using namespace detail_exact;
  if (y.size() != x.size()) throw std::invalid_argument("X and Y must have equal length");
  require_increasing(y, "Y");
  require_increasing(x, "X");
  require_args(y.size(), k, t);
  const int n = static_cast<int>(y.size());
  if (n > perm_cap)
    throw resource_error("transition_probability: permutation sum capped at N = " +
                         std::to_string(perm_cap));
  const std::vector<int> p = slot_exponents(n, k);
  bethe::MomentTable moments(t, spec);
  double sum = perm_sum(n, [&](int i, int j) {
    // slot j carries xi^{x_i - y_j - 1} (1-xi)^{p_j - p_i}
    return moments.at_dd(x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(j - 1)] - 1,
                         p[static_cast<std::size_t>(j - 1)] - p[static_cast<std::size_t>(i)]);
  });
  ExactResult res;
  res.value = sum;
  res.method = "perm-sum";
  res.moment_evals = moments.evals();
  return res;
}

// P[event: the k marked particles sit in a block at x,...,x+k-1 at the head
// of the pack (k >= 1), or leftmost particle at or right of x (k = 0)],
// from initial positions Y; determinant route (production path)
inline ExactResult event_probability(const std::vector<int>& y, int k, int x, double t,
                                     const bethe::SeriesSpec& spec = {}) {
  using namespace detail_exact;
  require_increasing(y, "Y");
  require_args(y.size(), k, t);
  const int n = static_cast<int>(y.size());
  const std::vector<int> q = row_exponents(n, k);
  bethe::MomentTable moments(t, spec);
  DetOutcome d = moment_det(n, [&](int i, int j) {
    return moments.at_dd(x - y[static_cast<std::size_t>(i)] - 1 + j,
                         q[static_cast<std::size_t>(i)]);
  });
  ExactResult res;
  res.value = d.det;
  res.method = "determinant";
  res.moment_evals = moments.evals();
  res.rcond = d.rcond;
  return res;
}

// same value via the N!-term expansion of the alternant; verification route
inline ExactResult event_probability_permsum(const std::vector<int>& y, int k, int x, double t,
                                             int perm_cap = default_perm_cap,
                                             const bethe::SeriesSpec& spec = {}) {
  using namespace detail_exact;
  require_increasing(y, "Y");
  require_args(y.size(), k, t);
  const int n = static_cast<int>(y.size());
  if (n > perm_cap)
    throw resource_error("event_probability_permsum: permutation sum capped at N = " +
                         std::to_string(perm_cap));
  const std::vector<int> q = row_exponents(n, k);
  bethe::MomentTable moments(t, spec);
  double sum = perm_sum(n, [&](int i, int j) {
    return moments.at_dd(x - y[static_cast<std::size_t>(i)] - 1 + (j - 1),
                         q[static_cast<std::size_t>(i)]);
  });
  ExactResult res;
  res.value = sum;
  res.method = "perm-sum";
  res.moment_evals = moments.evals();
  return res;
}

// step initial data Y = (1,...,N): the event probability collapses to a
// Hankel determinant that does not depend on k (k >= 1)
inline ExactResult step_event_probability(int n, int k, int x, double t,
                                          const bethe::SeriesSpec& spec = {}) {
  if (n < 1) throw std::invalid_argument("need N >= 1");
  if (k < 1 || k > n) throw std::invalid_argument("step formula requires 1 <= k <= N");
  if (t < 0) throw std::invalid_argument("need t >= 0");
  return detail_exact::hankel_form(n, x - n - 1, -(n - 1), t, spec);
}

// k = 0 companion: distribution tail of the leftmost particle under step
// initial data, single species
inline ExactResult tasep_leftmost_tail(int n, int x, double t,
                                       const bethe::SeriesSpec& spec = {}) {
  if (n < 1) throw std::invalid_argument("need N >= 1");
  if (t < 0) throw std::invalid_argument("need t >= 0");
  return detail_exact::hankel_form(n, x - n - 1, -n, t, spec);
}

// single entry point used by the CLI for step initial data, any k; k = 0
// takes the leftmost-tail route through the very same call
inline ExactResult step_dispatch(int n, int k, int x, double t,
                                 const bethe::SeriesSpec& spec = {}) {
  if (k == 0) return tasep_leftmost_tail(n, x, t, spec);
  return step_event_probability(n, k, x, t, spec);
}

}  // namespace tasep::exact

#endif
