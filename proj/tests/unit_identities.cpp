#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "tasep/detail/rng.hpp"
#include "tasep/identities.hpp"

using namespace tasep::identities;
using std::complex;

namespace {

SpectralPoint sample(int n, double radius, std::uint64_t stream) {
  auto rng = tasep::detail::replica_stream(20260819, stream);
  return sample_spectral_points(n, radius, default_min_sep, rng);
}

struct EnvThreads {
  explicit EnvThreads(const char* v) { setenv("TASEP_THREADS", v, 1); }
  ~EnvThreads() { unsetenv("TASEP_THREADS"); }
};

}  // namespace

TEST_CASE("sampled spectral points satisfy their constraints", "[identities]") {
  const auto p = sample(6, 0.5, 1);
  REQUIRE(p.size() == 6);
  for (const auto& z : p.xi) CHECK(std::abs(std::abs(z) - 0.5) < 1e-12);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      CHECK(std::abs(p.xi[static_cast<std::size_t>(i)] - p.xi[static_cast<std::size_t>(j)]) >=
            default_min_sep);
  // deterministic in the stream
  const auto q = sample(6, 0.5, 1);
  CHECK(p.xi == q.xi);
}

TEST_CASE("permutation sum over scattering diagonals has a product form", "[identities]") {
  for (int n : {2, 3, 4}) {
    for (int k = 0; k <= n; ++k) {
      const auto p = sample(n, 0.5, static_cast<std::uint64_t>(10 * n + k));
      CAPTURE(n, k);
      CHECK(check_bethe_sum_identity(n, k, p) <= 1e-12);
    }
  }
}

TEST_CASE("inverted-variable form of the sum identity", "[identities]") {
  for (int n : {2, 3, 4}) {
    for (int k = 0; k <= n; ++k) {
      const auto p = sample(n, 2.0, static_cast<std::uint64_t>(100 * n + k));
      CAPTURE(n, k);
      CHECK(check_equivalent_identity(n, k, p) <= 1e-12);
    }
  }
}

TEST_CASE("block expansion of the alternant product", "[identities]") {
  for (int n : {2, 3, 4, 5}) {
    for (int k = 0; k <= n; ++k) {
      const auto p = sample(n, 0.5, static_cast<std::uint64_t>(1000 * n + k));
      CAPTURE(n, k);
      CHECK(check_laplace_vandermonde(n, k, p) <= 1e-12);
    }
  }
}

TEST_CASE("antisymmetrized reciprocal powers collapse to a product", "[identities]") {
  for (int n : {2, 3, 4, 5}) {
    const auto p = sample(n, 0.5, static_cast<std::uint64_t>(7 * n));
    CAPTURE(n);
    CHECK(check_vandermonde_shift(n, p) <= 1e-12);
  }
}

TEST_CASE("shifting the monomial basis preserves the determinant", "[identities]") {
  for (int n : {2, 4, 6}) {
    const auto p = sample(n, 0.5, static_cast<std::uint64_t>(3 * n + 1));
    CHECK(check_shifted_basis_det(n, p) <= 1e-12);
  }
}

TEST_CASE("factor diagonal two-case form", "[identities]") {
  const auto p = sample(2, 0.5, 17);
  for (int n : {2, 3, 4, 5}) {
    for (int l = 1; l <= n - 1; ++l)
      for (int k = 0; k <= n; ++k) {
        CAPTURE(n, l, k);
        CHECK(check_tl_diagonal(n, l, k, p.xi[0], p.xi[1]) <= 1e-13);
      }
  }
  CHECK_THROWS_AS(check_tl_diagonal(3, 3, 1, p.xi[0], p.xi[1]), std::invalid_argument);
}

TEST_CASE("identity checks reject degenerate spectral points", "[identities]") {
  SpectralPoint dup{{complex<double>(0.2, 0.1), complex<double>(0.2, 0.1)}};
  CHECK_THROWS_AS(check_bethe_sum_identity(2, 1, dup), std::invalid_argument);
  SpectralPoint at_one{{complex<double>(1.0, 0.0), complex<double>(0.3, 0.0)}};
  CHECK_THROWS_AS(check_bethe_sum_identity(2, 1, at_one), std::invalid_argument);
  SpectralPoint outside{{complex<double>(1.5, 0.0), complex<double>(0.3, 0.0)}};
  CHECK_THROWS_AS(check_bethe_sum_identity(2, 1, outside), std::invalid_argument);
  SpectralPoint zero{{complex<double>(0.0, 0.0), complex<double>(2.0, 1.0)}};
  CHECK_THROWS_AS(check_equivalent_identity(2, 1, zero), std::invalid_argument);
  CHECK_THROWS_AS(check_bethe_sum_identity(1, 0, sample(1, 0.5, 9)), std::invalid_argument);
}

TEST_CASE("a perturbed exponent is caught", "[identities]") {
  // harness sanity: the checks must be able to fail
  const auto rule = perturbed_exponent_rule();
  const auto p = sample(3, 0.5, 23);
  CHECK(check_bethe_sum_identity(3, 1, p, rule) > 1e-6);
  const auto q = sample(3, 2.0, 29);
  CHECK(check_equivalent_identity(3, 1, q, rule) > 1e-6);
}

TEST_CASE("suite composition and determinism", "[identities]") {
  const auto reports = run_suite(4242, 2);
  // three k-indexed checks over N = 2..6, plus two k-free rows per N
  const std::size_t k_rows = 3 * (3 + 4 + 5 + 6 + 7);
  REQUIRE(reports.size() == k_rows + 5 + 5);
  for (const auto& r : reports) {
    CAPTURE(r.name, r.n, r.k);
    CHECK(r.pass);
    CHECK(r.trials == 2);
    CHECK(r.max_rel_err <= default_threshold);
  }

  const auto again = run_suite(4242, 2);
  for (std::size_t i = 0; i < reports.size(); ++i)
    CHECK(reports[i].max_rel_err == again[i].max_rel_err);

  std::vector<double> pooled;
  {
    EnvThreads env("3");
    for (const auto& r : run_suite(4242, 2)) pooled.push_back(r.max_rel_err);
  }
  for (std::size_t i = 0; i < reports.size(); ++i)
    CHECK(reports[i].max_rel_err == pooled[i]);
}

TEST_CASE("suite flags failures", "[identities]") {
  // a threshold below the arithmetic noise floor must trip rows
  const auto strict = run_suite(4242, 2, 1e-30);
  CHECK(std::any_of(strict.begin(), strict.end(),
                    [](const IdentityReport& r) { return !r.pass; }));

  // and so must a deliberately wrong exponent in the closed form
  const auto mutated = run_suite(4242, 2, default_threshold, perturbed_exponent_rule());
  bool bethe_failed = false, laplace_ok = true;
  for (const auto& r : mutated) {
    if (r.name == "bethe-sum" && !r.pass) bethe_failed = true;
    if (r.name == "laplace-vandermonde" && !r.pass) laplace_ok = false;
  }
  CHECK(bethe_failed);
  CHECK(laplace_ok);  // checks that do not use the rule stay green
}
