#ifndef TASEP_BETHE_HPP
#define TASEP_BETHE_HPP

// The atomic quantity of every exact formula in this project:
//
//   I(m, r, t) = (1/2pi i) oint_C xi^m (1-xi)^r e^{(1/xi - 1) t} dxi,
//
// C a counterclockwise circle around the origin with radius < 1.  Two
// independent evaluation paths are kept deliberately:
//
//   moment_series     residue at the origin, I = e^{-t} sum_j (t^j/j!) c_{j-m-1}(r)
//                     where c_n(r) = [xi^n] (1-xi)^r.  For r < 0 all terms are
//                     nonnegative, so the series is cancellation-free.
//   moment_quadrature trapezoid rule on the circle.  The integrand reaches
//                     ~1e25 while the integral can be ~1e10 (ratio ~1e14 at
//                     the corner m=-40, r=-12, t=3, radius 0.3), so node
//                     values and the accumulation run in double-double with
//                     node tables filled at 50 significant digits; sums whose
//                     tracked roundoff floor still reaches the agreement
//                     target are redone outright at 50 digits.
//
// Agreement between the two is asserted with the mixed tolerance
// |a-b| <= tol * max(1, |a|, |b|): values legitimately exceed 1/ulp-sized
// magnitudes, where a fixed absolute tolerance is not even representable.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tasep/detail/dd.hpp"
#include "tasep/errors.hpp"

namespace tasep::bethe {

struct ContourMomentKey {
  int m = 0;       // power of xi (any sign)
  int r = 0;       // power of (1 - xi) (any sign)
  double t = 0.0;  // time, >= 0
};

struct SeriesSpec {
  // truncation tolerance for the r < 0 tail bound.  The accumulation runs in
  // double-double, and downstream determinants need entry errors well under
  // 1e-12 absolute at entry magnitudes ~1e3, so the series is carried to
  // (almost) full working precision by default.
  double rel_tol = 1e-28;
  int max_terms = 0;  // 0: auto, 10*(t + |m| + |r|) + 200
};

struct QuadratureSpec {
  double radius = 0.5;  // strictly inside (0,1)
  int nodes = 512;
};

inline int series_term_cap(const ContourMomentKey& key, const SeriesSpec& spec) {
  if (spec.max_terms > 0) return spec.max_terms;
  const double cap = 10.0 * (key.t + std::abs(key.m) + std::abs(key.r)) + 200.0;
  return cap > 1e7 ? 10000000 : static_cast<int>(cap);
}

inline detail::dd moment_series_dd(const ContourMomentKey& key, const SeriesSpec& spec = {}) {
  using detail::dd;
  const int m = key.m, r = key.r;
  const double t = key.t;
  if (t < 0) throw std::invalid_argument("moment_series: t must be >= 0");
  const int cap = series_term_cap(key, spec);

  // terms start at j0, the first index with n = j - m - 1 >= 0
  const int j0 = std::max(0, m + 1);
  const int n0 = j0 - m - 1;
  if (r >= 0 && n0 > r) return dd(0.0);  // the whole support of c_n(r) sits below j = 0

  // seed c = c_{n0}(r) by the one-step recurrence up from c_0 = 1
  dd c(1.0);
  for (int n = 1; n <= n0; ++n) {
    if (r >= 0)
      c = -c * dd(static_cast<double>(r - n + 1)) / dd(static_cast<double>(n));
    else
      c = c * dd(static_cast<double>(n - r - 1)) / dd(static_cast<double>(n));
  }
  // seed w = e^{-t} t^{j0} / j0!
  dd w(std::exp(-t));
  for (int j = 1; j <= j0; ++j) w = w * dd(t) / dd(static_cast<double>(j));

  dd sum(0.0);
  for (int j = j0, n = n0;; ++j, ++n) {
    if (j > j0) {
      w = w * dd(t) / dd(static_cast<double>(j));
      if (r >= 0)
        c = (n > r) ? dd(0.0) : -c * dd(static_cast<double>(r - n + 1)) / dd(static_cast<double>(n));
      else
        c = c * dd(static_cast<double>(n - r - 1)) / dd(static_cast<double>(n));
    }
    sum = sum + w * c;
    if (r >= 0 && n >= r) break;  // support exhausted
    if (t == 0.0) break;          // only the first term is nonzero
    if (r < 0) {
      // all terms positive; term ratio from j to j+1 is (t/(j+1)) (n+|r|)/(n+1)
      double ratio = (t / (j + 1)) * (static_cast<double>(n - r) / (n + 1));
      if (ratio < 0.5) {
        double term = (w * c).to_double();
        if (term * ratio / (1.0 - ratio) <= spec.rel_tol * sum.to_double()) break;
      }
    }
    if (j >= cap)
      throw numeric_error("moment_series: no convergence within " + std::to_string(cap) +
                          " terms");
  }
  return sum;
}

inline double moment_series(const ContourMomentKey& key, const SeriesSpec& spec = {}) {
  return moment_series_dd(key, spec).to_double();
}

// ---- quadrature -----------------------------------------------------------

namespace mp = boost::multiprecision;
using float50 = mp::cpp_bin_float_50;
using complex50 = mp::cpp_complex_50;

inline detail::dd to_dd(const float50& v) {
  double hi = v.convert_to<double>();
  double lo = (v - hi).convert_to<double>();
  return {hi, lo};
}

inline detail::ddcomplex to_ddc(const complex50& v) { return {to_dd(v.real()), to_dd(v.imag())}; }

// integer powers by binary powering; works for any field-like value type
template <typename C>
inline C powi_any(C b, long e) {
  if (e < 0) return C(1) / powi_any(b, -e);
  C acc(1);
  while (e > 0) {
    if (e & 1) acc = acc * b;
    b = b * b;
    e >>= 1;
  }
  return acc;
}

// per-node data for a fixed (radius, nodes, t): xi_n and the combined weight
// xi_n e^{(1/xi_n - 1) t} / M.  The 50-digit values used to fill the
// double-double tables are kept: node sums whose cancellation exceeds what
// double-double can certify are redone with them.
struct QuadratureTable {
  std::vector<detail::ddcomplex> xi;
  std::vector<detail::ddcomplex> weight;
  std::vector<complex50> xi50;
  std::vector<complex50> weight50;
  double radius = 0.0;
  double t = 0.0;

  QuadratureTable(const QuadratureSpec& spec, double t_) : radius(spec.radius), t(t_) {
    if (!(spec.radius > 0.0 && spec.radius < 1.0))
      throw std::invalid_argument("quadrature radius must lie in (0,1)");
    if (spec.nodes < 4) throw std::invalid_argument("quadrature needs at least 4 nodes");
    if (t_ < 0) throw std::invalid_argument("quadrature: t must be >= 0");
    const int m_nodes = spec.nodes;
    const float50 pi = 4 * atan(float50(1));
    const float50 rho(spec.radius);
    const float50 tt(t_);
    xi.reserve(static_cast<std::size_t>(m_nodes));
    weight.reserve(static_cast<std::size_t>(m_nodes));
    xi50.reserve(static_cast<std::size_t>(m_nodes));
    weight50.reserve(static_cast<std::size_t>(m_nodes));
    for (int n = 0; n < m_nodes; ++n) {
      float50 theta = 2 * pi * n / m_nodes;
      complex50 z(rho * cos(theta), rho * sin(theta));
      complex50 w = z * exp((complex50(1) / z - 1) * tt) / m_nodes;
      xi.push_back(to_ddc(z));
      weight.push_back(to_ddc(w));
      xi50.push_back(z);
      weight50.push_back(w);
    }
  }
};

// roundoff floor of a double-double node sum: each term carries a relative
// error of a few eps_dd from the power ladders, so the absolute noise is
// bounded by (sum of |term|) times this factor (taken with ample margin)
inline constexpr double quadrature_noise_factor = 1e-29;

// refinement trigger: noise must stay well under the 1e-12 agreement floor
inline bool quadrature_needs_refine(double mag_sum, double value) {
  return mag_sum * quadrature_noise_factor > 1e-13 * std::max(1.0, std::abs(value));
}

struct QuadratureResult {
  double value = 0.0;
  double imag_abs = 0.0;   // |imaginary residue|; exact value is real
  bool imag_warning = false;
};

inline QuadratureResult moment_quadrature_full(const ContourMomentKey& key,
                                               const QuadratureSpec& spec = {}) {
  using detail::ddcomplex;
  QuadratureTable table(spec, key.t);
  ddcomplex acc;
  double mag_sum = 0.0;
  const auto one = detail::dd(1.0);
  for (std::size_t n = 0; n < table.xi.size(); ++n) {
    ddcomplex z = table.xi[n];
    ddcomplex omz = ddcomplex(one) - z;
    ddcomplex term = detail::powi(z, key.m) * detail::powi(omz, key.r) * table.weight[n];
    acc = acc + term;
    mag_sum += std::abs(term.re.hi) + std::abs(term.im.hi);
  }
  double re = acc.re.to_double();
  double im = acc.im.to_double();
  if (quadrature_needs_refine(mag_sum, re)) {
    complex50 acc50(0);
    for (std::size_t n = 0; n < table.xi50.size(); ++n) {
      const complex50& z = table.xi50[n];
      acc50 += powi_any(z, key.m) * powi_any(complex50(1) - z, key.r) * table.weight50[n];
    }
    re = acc50.real().convert_to<double>();
    im = acc50.imag().convert_to<double>();
  }
  QuadratureResult res;
  res.value = re;
  res.imag_abs = std::abs(im);
  // roundoff in the imaginary part scales with the integrand magnitude, so
  // the vanishing check is scaled the same way as the series/quadrature one
  res.imag_warning = res.imag_abs > 1e-9 * std::max(1.0, std::abs(res.value));
  return res;
}

inline double moment_quadrature(const ContourMomentKey& key, const QuadratureSpec& spec = {}) {
  return moment_quadrature_full(key, spec).value;
}

// all I(m, r, t) for m in [m_lo, m_hi], r in [r_lo, r_hi] at one (radius, t);
// shares the node table and per-node power ladders across the whole block.
// grid[m - m_lo][r - r_lo] = I(m, r, t).
inline std::vector<std::vector<double>> moment_quadrature_grid(int m_lo, int m_hi, int r_lo,
                                                               int r_hi, double t,
                                                               const QuadratureSpec& spec = {}) {
  using detail::ddcomplex;
  if (m_lo > m_hi || r_lo > r_hi) throw std::invalid_argument("moment grid: empty range");
  QuadratureTable table(spec, t);
  const std::size_t mn = static_cast<std::size_t>(m_hi - m_lo + 1);
  const std::size_t rn = static_cast<std::size_t>(r_hi - r_lo + 1);
  std::vector<std::vector<ddcomplex>> acc(mn, std::vector<ddcomplex>(rn));
  std::vector<std::vector<double>> mag(mn, std::vector<double>(rn, 0.0));
  const auto one = detail::dd(1.0);
  for (std::size_t n = 0; n < table.xi.size(); ++n) {
    ddcomplex z = table.xi[n];
    ddcomplex omz = ddcomplex(one) - z;
    ddcomplex base = detail::powi(omz, r_lo);
    ddcomplex pm = detail::powi(z, m_lo) * table.weight[n];
    for (std::size_t im = 0; im < mn; ++im) {
      ddcomplex cur = pm * base;
      for (std::size_t ir = 0; ir < rn; ++ir) {
        acc[im][ir] = acc[im][ir] + cur;
        mag[im][ir] += std::abs(cur.re.hi) + std::abs(cur.im.hi);
        cur = cur * omz;
      }
      pm = pm * z;
    }
  }
  std::vector<std::vector<double>> out(mn, std::vector<double>(rn));
  for (std::size_t im = 0; im < mn; ++im)
    for (std::size_t ir = 0; ir < rn; ++ir) out[im][ir] = acc[im][ir].re.to_double();
  // rows where the double-double noise floor reaches the agreement target
  // (deep negative m at small radius: |xi|^m blows up while the integral
  // stays small) are redone with the retained 50-digit nodes
  for (std::size_t im = 0; im < mn; ++im) {
    bool redo = false;
    for (std::size_t ir = 0; ir < rn && !redo; ++ir)
      redo = quadrature_needs_refine(mag[im][ir], out[im][ir]);
    if (!redo) continue;
    std::vector<complex50> row(rn, complex50(0));
    for (std::size_t n = 0; n < table.xi50.size(); ++n) {
      const complex50& z = table.xi50[n];
      const complex50 omz = complex50(1) - z;
      complex50 cur = powi_any(z, m_lo + static_cast<long>(im)) *
                      powi_any(omz, r_lo) * table.weight50[n];
      for (std::size_t ir = 0; ir < rn; ++ir) {
        row[ir] += cur;
        cur = cur * omz;
      }
    }
    for (std::size_t ir = 0; ir < rn; ++ir) out[im][ir] = row[ir].real().convert_to<double>();
  }
  return out;
}

// memoized series values at fixed t; owned by one evaluation at a time
// (determinant/permutation-sum entries reuse overlapping (m, r) keys)
class MomentTable {
 public:
  explicit MomentTable(double t, SeriesSpec spec = {}) : t_(t), spec_(spec) {}

  double operator()(int m, int r) { return at_dd(m, r).to_double(); }

  // full working-precision value, for the determinant and signed-sum
  // consumers whose own accumulation runs in double-double
  detail::dd at_dd(int m, int r) {
    std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(m)) << 32) |
                        static_cast<std::uint32_t>(r);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    detail::dd v = moment_series_dd({m, r, t_}, spec_);
    memo_.emplace(key, v);
    ++evals_;
    return v;
  }

  double t() const { return t_; }
  long evals() const { return evals_; }

 private:
  double t_;
  SeriesSpec spec_;
  std::unordered_map<std::uint64_t, detail::dd> memo_;
  long evals_ = 0;
};

}  // namespace tasep::bethe

#endif
