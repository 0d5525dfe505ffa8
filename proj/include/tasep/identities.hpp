#ifndef TASEP_IDENTITIES_HPP
#define TASEP_IDENTITIES_HPP

// Numerical verification of the standalone algebraic identities behind the
// probability formulas, at random spectral points.  All identities are
// equalities of rational functions, so agreement at generic points to 1e-10
// over many trials is decisive.  The antisymmetrized N! sums cancel down by
// ~12 digits at N = 6 (measured: plain doubles leave relative errors around
// 1e-6), so terms and accumulators use double-double complex arithmetic.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "tasep/detail/dd.hpp"
#include "tasep/detail/parallel.hpp"
#include "tasep/detail/rng.hpp"
#include "tasep/errors.hpp"
#include "tasep/matrices.hpp"

namespace tasep::identities {

using cd = std::complex<double>;
using matrices::SpectralPoint;

struct IdentityReport {
  std::string name;
  int n = 0;
  int k = -1;  // -1 when the check has no k parameter
  int trials = 0;
  double max_rel_err = 0.0;
  bool pass = false;
};

// exponent on slot j (1-based) in the diagonal closed form; injectable so the
// mutation harness can prove the checks are able to fail
using ExponentRule = std::function<int(int, int)>;
inline int standard_exponent(int j, int k) { return (j <= k) ? j - 1 : j - 2; }
inline ExponentRule perturbed_exponent_rule(int slot = 2) {
  return [slot](int j, int k) { return standard_exponent(j, k) + (j == slot ? 1 : 0); };
}

namespace detail_id {

using tasep::detail::dd;
using tasep::detail::ddcomplex;

inline ddcomplex lift(cd z) { return {dd(z.real()), dd(z.imag())}; }
inline ddcomplex one() { return ddcomplex(dd(1.0)); }
inline double abs_val(ddcomplex z) { return std::sqrt(tasep::detail::abs2_double(z)); }

inline double rel_err(ddcomplex a, ddcomplex b) {
  const double scale = std::max(abs_val(a), abs_val(b));
  if (scale == 0.0) return 0.0;
  return abs_val(a - b) / scale;
}

template <typename Fn>
void for_each_permutation(int n, Fn&& fn) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 1);
  do {
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)]) ++inv;
    fn(perm, (inv % 2 == 0) ? 1 : -1);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

inline void require_points(const SpectralPoint& p, int n, bool inside_unit_disk,
                           bool nonzero_allowed_only) {
  if (p.size() != n) throw std::invalid_argument("identity check: xi size must equal N");
  for (int i = 0; i < n; ++i) {
    const cd z = p.xi[static_cast<std::size_t>(i)];
    if (z == cd(1.0)) throw std::invalid_argument("identity check: xi = 1 is singular");
    if (inside_unit_disk && std::abs(z) >= 1.0)
      throw std::invalid_argument("identity check: need |xi| < 1");
    if (nonzero_allowed_only && z == cd(0.0))
      throw std::invalid_argument("identity check: xi = 0 is singular");
    for (int j = i + 1; j < n; ++j)
      if (z == p.xi[static_cast<std::size_t>(j)])
        throw std::invalid_argument("identity check: xi must be distinct");
  }
}

// product of (xi_j - xi_i) over index pairs i < j within the sorted set
inline ddcomplex vandermonde_product(const std::vector<int>& set, const SpectralPoint& p) {
  ddcomplex acc = one();
  for (std::size_t a = 0; a < set.size(); ++a)
    for (std::size_t b = a + 1; b < set.size(); ++b)
      acc = acc * (lift(p.xi[static_cast<std::size_t>(set[b] - 1)]) -
                   lift(p.xi[static_cast<std::size_t>(set[a] - 1)]));
  return acc;
}

// sign of the two-line permutation (I, I^c // J, J^c), rows sorted ascending
inline int laplace_sign(int n, const std::vector<int>& jset) {
  const int k = static_cast<int>(jset.size());
  std::vector<int> top, bottom;
  top.reserve(static_cast<std::size_t>(n));
  bottom = jset;
  for (int i = n - k + 1; i <= n; ++i) top.push_back(i);
  for (int i = 1; i <= n - k; ++i) top.push_back(i);
  std::vector<char> in_j(static_cast<std::size_t>(n) + 1, 0);
  for (int j : jset) in_j[static_cast<std::size_t>(j)] = 1;
  for (int i = 1; i <= n; ++i)
    if (!in_j[static_cast<std::size_t>(i)]) bottom.push_back(i);
  std::vector<int> oneline(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m)
    oneline[static_cast<std::size_t>(top[static_cast<std::size_t>(m)] - 1)] =
        bottom[static_cast<std::size_t>(m)];
  int inv = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (oneline[static_cast<std::size_t>(i)] > oneline[static_cast<std::size_t>(j)]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

}  // namespace detail_id

// sum over S_N of (closed-form diagonal) x (spectral monomial) / (suffix
// products), against its product closed form
inline double check_bethe_sum_identity(int n, int k, const SpectralPoint& p,
                                       const ExponentRule& rule = standard_exponent) {
  using namespace detail_id;
  if (n < 2 || k < 0 || k > n) throw std::invalid_argument("bethe sum: need N >= 2, 0 <= k <= N");
  require_points(p, n, /*inside_unit_disk=*/true, /*nonzero_allowed_only=*/false);

  ddcomplex lhs;
  for_each_permutation(n, [&](const std::vector<int>& sigma, int sign) {
    ddcomplex term(dd(static_cast<double>(sign)));
    for (int j = 1; j <= n; ++j) {
      const ddcomplex num = one() - lift(p.xi[static_cast<std::size_t>(j - 1)]);
      const ddcomplex den =
          one() - lift(p.xi[static_cast<std::size_t>(sigma[static_cast<std::size_t>(j - 1)] - 1)]);
      term = term * tasep::detail::powi(num / den, rule(j, k));
    }
    for (int j = 2; j <= n; ++j)
      term = term *
             tasep::detail::powi(
                 lift(p.xi[static_cast<std::size_t>(sigma[static_cast<std::size_t>(j - 1)] - 1)]),
                 j - 1);
    ddcomplex denom = one();
    ddcomplex suffix = one();
    for (int j = n; j >= k + 1; --j) {
      suffix =
          lift(p.xi[static_cast<std::size_t>(sigma[static_cast<std::size_t>(j - 1)] - 1)]) * suffix;
      denom = denom * (one() - suffix);
    }
    lhs = lhs + term / denom;
  });

  ddcomplex rhs = one();
  for (int i = 1; i <= k; ++i) rhs = rhs * (one() - lift(p.xi[static_cast<std::size_t>(i - 1)]));
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      rhs = rhs * (lift(p.xi[static_cast<std::size_t>(j - 1)]) -
                   lift(p.xi[static_cast<std::size_t>(i - 1)])) /
            (one() - lift(p.xi[static_cast<std::size_t>(i - 1)]));
  for (int i = 1; i <= n; ++i) rhs = rhs / (one() - lift(p.xi[static_cast<std::size_t>(i - 1)]));
  return rel_err(lhs, rhs);
}

// the same identity after inverting and reversing the variables; points are
// taken outside the unit circle here
inline double check_equivalent_identity(int n, int k, const SpectralPoint& p,
                                        const ExponentRule& rule = standard_exponent) {
  using namespace detail_id;
  if (n < 2 || k < 0 || k > n) throw std::invalid_argument("equivalent: need N >= 2, 0 <= k <= N");
  require_points(p, n, /*inside_unit_disk=*/false, /*nonzero_allowed_only=*/true);

  ddcomplex lhs;
  for_each_permutation(n, [&](const std::vector<int>& sigma, int sign) {
    ddcomplex term(dd(static_cast<double>(sign)));
    for (int j = 1; j <= n; ++j) {
      const cd z = p.xi[static_cast<std::size_t>(sigma[static_cast<std::size_t>(n - j)] - 1)];
      term = term * tasep::detail::powi(lift(z) - one(), -rule(j, k));
    }
    for (int pos = 1; pos <= n - k - 1; ++pos)
      term = term *
             tasep::detail::powi(
                 lift(p.xi[static_cast<std::size_t>(sigma[static_cast<std::size_t>(pos - 1)] - 1)]),
                 n - k - pos);
    ddcomplex prefix = one();
    for (int m = 1; m <= n - k; ++m) {
      prefix = prefix *
               lift(p.xi[static_cast<std::size_t>(sigma[static_cast<std::size_t>(m - 1)] - 1)]);
      const ddcomplex factor = prefix - one();
      if (abs_val(factor) < 1e-12)
        throw std::invalid_argument("equivalent: partial product hits 1, singular");
      term = term / factor;
    }
    lhs = lhs + term;
  });

  ddcomplex rhs = one();
  for (int i = 1; i <= n; ++i)
    rhs = rhs * tasep::detail::powi(lift(p.xi[static_cast<std::size_t>(i - 1)]) - one(), -(n - 1));
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 1);
  rhs = rhs * vandermonde_product(all, p);
  return rel_err(lhs, rhs);
}

// block expansion of the Vandermonde determinant along the rows that carry
// the shifted basis
inline double check_laplace_vandermonde(int n, int k, const SpectralPoint& p) {
  using namespace detail_id;
  if (n < 1 || k < 0 || k > n) throw std::invalid_argument("laplace: need 0 <= k <= N");
  require_points(p, n, false, false);

  ddcomplex lhs;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    std::vector<int> jset, jcomp;
    for (int i = 1; i <= n; ++i)
      ((mask >> (i - 1)) & 1u ? jset : jcomp).push_back(i);
    ddcomplex term(dd(static_cast<double>(laplace_sign(n, jset))));
    for (int i : jset)
      term = term * tasep::detail::powi(lift(p.xi[static_cast<std::size_t>(i - 1)]) - one(), n - k);
    term = term * vandermonde_product(jset, p) * vandermonde_product(jcomp, p);
    lhs = lhs + term;
  }
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 1);
  return rel_err(lhs, vandermonde_product(all, p));
}

// antisymmetrized sum of shifted reciprocal powers against its product form
inline double check_vandermonde_shift(int n, const SpectralPoint& p) {
  using namespace detail_id;
  if (n < 2) throw std::invalid_argument("shift: need N >= 2");
  require_points(p, n, false, false);

  ddcomplex lhs;
  for_each_permutation(n, [&](const std::vector<int>& sigma, int sign) {
    ddcomplex term(dd(static_cast<double>(sign)));
    for (int j = 2; j <= n; ++j) {
      const cd z = p.xi[static_cast<std::size_t>(sigma[static_cast<std::size_t>(n - j)] - 1)];
      term = term * tasep::detail::powi(lift(z) - one(), -(j - 1));
    }
    lhs = lhs + term;
  });
  ddcomplex rhs = one();
  for (int i = 1; i <= n; ++i)
    rhs = rhs * tasep::detail::powi(lift(p.xi[static_cast<std::size_t>(i - 1)]) - one(), -(n - 1));
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 1);
  rhs = rhs * vandermonde_product(all, p);
  return rel_err(lhs, rhs);
}

// determinant in the basis (xi - 1)^j equals the one in the basis xi^j
inline double check_shifted_basis_det(int n, const SpectralPoint& p) {
  if (n < 1 || p.size() != n) throw std::invalid_argument("shifted basis: xi size must equal N");
  Eigen::MatrixXcd a(n, n), b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = matrices::cpowi(p.xi[static_cast<std::size_t>(i)] - cd(1.0), j);
      b(i, j) = matrices::cpowi(p.xi[static_cast<std::size_t>(i)], j);
    }
  const cd da = a.determinant(), db = b.determinant();
  const double scale = std::max(std::abs(da), std::abs(db));
  return scale == 0.0 ? 0.0 : std::abs(da - db) / scale;
}

// dense exchange-factor diagonal against the two-case closed form
inline double check_tl_diagonal(int n, int l, int k, cd xi_alpha, cd xi_beta) {
  if (n < 2 || l < 1 || l > n - 1 || k < 0 || k > n)
    throw std::invalid_argument("tl diagonal: need 1 <= l <= N-1, 0 <= k <= N");
  SpectralPoint p;
  p.xi = {xi_alpha, xi_beta};
  const int h = matrices::h_index(k, n);
  const cd entry = matrices::t_matrix(l, 1, 2, n, p)(h - 1, h - 1);
  const cd expected = (l == k) ? cd(-1.0) : -(cd(1.0) - xi_beta) / (cd(1.0) - xi_alpha);
  const double scale = std::max(std::abs(entry), std::abs(expected));
  return scale == 0.0 ? 0.0 : std::abs(entry - expected) / scale;
}

// rejection-sample distinct points on a circle with a minimum pairwise gap
// (keeps the Vandermonde factors well conditioned)
inline SpectralPoint sample_spectral_points(int n, double radius, double min_sep,
                                            tasep::detail::splitmix64& rng) {
  SpectralPoint p;
  p.xi.resize(static_cast<std::size_t>(n));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (int i = 0; i < n; ++i) {
      const double theta = 2.0 * M_PI * rng.uniform01();
      p.xi[static_cast<std::size_t>(i)] = radius * cd(std::cos(theta), std::sin(theta));
    }
    bool ok = true;
    for (int i = 0; ok && i < n; ++i)
      for (int j = i + 1; ok && j < n; ++j)
        if (std::abs(p.xi[static_cast<std::size_t>(i)] - p.xi[static_cast<std::size_t>(j)]) <
            min_sep)
          ok = false;
    if (ok) return p;
  }
  throw numeric_error("sample_spectral_points: could not satisfy the separation constraint");
}

inline constexpr double default_threshold = 1e-10;
inline constexpr double default_min_sep = 1e-3;

// every check over N = 2..6 (k = 0..N where applicable), `trials` random
// spectral points per row; deterministic given seed and independent of
// thread count (per-(row, trial) derived streams)
inline std::vector<IdentityReport> run_suite(std::uint64_t seed, int trials,
                                             double threshold = default_threshold,
                                             const ExponentRule& rule = standard_exponent) {
  if (trials < 1) throw std::invalid_argument("run_suite: need trials >= 1");
  struct Row {
    const char* name;
    int n;
    int k;
  };
  std::vector<Row> rows;
  for (const char* name : {"bethe-sum", "equivalent", "laplace-vandermonde"})
    for (int n = 2; n <= 6; ++n)
      for (int k = 0; k <= n; ++k) rows.push_back({name, n, k});
  for (int n = 2; n <= 6; ++n) rows.push_back({"vandermonde-shift", n, -1});
  for (int n = 2; n <= 6; ++n) rows.push_back({"tl-diagonal", n, -1});

  std::vector<IdentityReport> reports(rows.size());
  tasep::detail::parallel_for(rows.size(), [&](std::size_t row_id) {
    const Row& row = rows[row_id];
    IdentityReport rep;
    rep.name = row.name;
    rep.n = row.n;
    rep.k = row.k;
    rep.trials = trials;
    const std::string name = row.name;
    for (int trial = 0; trial < trials; ++trial) {
      auto rng = tasep::detail::replica_stream(
          seed, static_cast<std::uint64_t>(row_id) * 100003ULL + static_cast<std::uint64_t>(trial));
      double err = 0.0;
      if (name == "bethe-sum") {
        const auto p = sample_spectral_points(row.n, 0.5, default_min_sep, rng);
        err = check_bethe_sum_identity(row.n, row.k, p, rule);
      } else if (name == "equivalent") {
        const auto p = sample_spectral_points(row.n, 2.0, default_min_sep, rng);
        err = check_equivalent_identity(row.n, row.k, p, rule);
      } else if (name == "laplace-vandermonde") {
        const auto p = sample_spectral_points(row.n, 0.5, default_min_sep, rng);
        err = check_laplace_vandermonde(row.n, row.k, p);
      } else if (name == "vandermonde-shift") {
        const auto p = sample_spectral_points(row.n, 0.5, default_min_sep, rng);
        err = check_vandermonde_shift(row.n, p);
      } else {
        const auto p = sample_spectral_points(2, 0.5, default_min_sep, rng);
        for (int l = 1; l <= row.n - 1; ++l)
          for (int k = 0; k <= row.n; ++k)
            err = std::max(err, check_tl_diagonal(row.n, l, k, p.xi[0], p.xi[1]));
      }
      rep.max_rel_err = std::max(rep.max_rel_err, err);
    }
    rep.pass = rep.max_rel_err <= threshold;
    reports[row_id] = std::move(rep);
  });
  return reports;
}

}  // namespace tasep::identities

#endif
