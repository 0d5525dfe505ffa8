#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <stdexcept>
#include <vector>

#include "tasep/errors.hpp"
#include "tasep/matrices.hpp"

using namespace tasep::matrices;
using std::complex;

namespace {

const SpectralPoint& three_points() {
  static const SpectralPoint p{{cd(0.31, 0.12), cd(-0.24, 0.33), cd(0.05, -0.41)}};
  return p;
}

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("basis slot of the leading marked block", "[matrices]") {
  CHECK(h_index(0, 3) == 1);
  CHECK(h_index(1, 3) == 5);
  CHECK(h_index(2, 3) == 7);
  CHECK(h_index(3, 3) == 8);
  CHECK(h_index(4, 4) == 16);
  CHECK(h_index(0, 7) == 1);
  CHECK_THROWS_AS(h_index(-1, 3), std::invalid_argument);
  CHECK_THROWS_AS(h_index(4, 3), std::invalid_argument);
}

TEST_CASE("two-particle exchange block", "[matrices]") {
  SpectralPoint p{{cd(0.2, 0.1), cd(-0.3, 0.25)}};
  const cd xa = p.xi[0], xb = p.xi[1];
  const auto s = s_matrix(1, 2, p);
  const cd d = -(cd(1.0) - xb) / (cd(1.0) - xa);
  CHECK(std::abs(s(0, 0) - d) < 1e-15);
  CHECK(std::abs(s(1, 1) - d) < 1e-15);
  CHECK(std::abs(s(2, 2) - cd(-1.0)) < 1e-15);
  CHECK(std::abs(s(3, 3) - d) < 1e-15);
  CHECK(std::abs(s(1, 2) - (xb - xa) / (cd(1.0) - xa)) < 1e-15);
  // every other entry vanishes
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (!(i == j || (i == 1 && j == 2))) CHECK(s(i, j) == cd(0.0));

  CHECK_THROWS_AS(s_matrix(1, 1, p), std::invalid_argument);
  CHECK_THROWS_AS(s_matrix(0, 2, p), std::invalid_argument);
  SpectralPoint bad{{cd(1.0, 0.0), cd(0.5, 0.0)}};
  CHECK_THROWS_AS(s_matrix(1, 2, bad), std::domain_error);
}

TEST_CASE("embedded factor dimensions and placement", "[matrices]") {
  const auto& p = three_points();
  const auto t1 = t_matrix(1, 1, 2, 3, p);
  const auto t2 = t_matrix(2, 1, 2, 3, p);
  REQUIRE(t1.rows() == 8);
  REQUIRE(t2.rows() == 8);
  // factor at the left edge: S (x) I_2, so the top-left 4x4 is diag-replicated
  const auto s = s_matrix(1, 2, p);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(std::abs(t1(2 * i, 2 * j) - s(i, j)) < 1e-15);
      CHECK(std::abs(t1(2 * i + 1, 2 * j + 1) - s(i, j)) < 1e-15);
      CHECK(t1(2 * i, 2 * j + 1) == cd(0.0));
    }
  // factor at the right edge: I_2 (x) S in the two diagonal blocks
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(std::abs(t2(i, j) - s(i, j)) < 1e-15);
      CHECK(std::abs(t2(4 + i, 4 + j) - s(i, j)) < 1e-15);
      CHECK(t2(i, 4 + j) == cd(0.0));
      CHECK(t2(4 + i, j) == cd(0.0));
    }

  CHECK_THROWS_AS(t_matrix(0, 1, 2, 3, p), std::invalid_argument);
  CHECK_THROWS_AS(t_matrix(3, 1, 2, 3, p), std::invalid_argument);
  SpectralPoint big;
  for (int i = 0; i < 9; ++i) big.xi.push_back(cd(0.1 * (i + 1), 0.02 * i));
  CHECK_THROWS_AS(t_matrix(1, 1, 2, 9, big), tasep::resource_error);
}

TEST_CASE("diagonal entry of a single factor at the block slot", "[matrices]") {
  // the entry is -1 when the factor position equals the block length,
  // and the generic ratio otherwise
  SpectralPoint p{{cd(0.4, -0.2), cd(-0.1, 0.3)}};
  const cd ratio = -(cd(1.0) - p.xi[1]) / (cd(1.0) - p.xi[0]);
  for (int n : {2, 3, 4, 5}) {
    for (int l = 1; l <= n - 1; ++l) {
      for (int k = 0; k <= n; ++k) {
        const int h = h_index(k, n);
        const cd entry = t_matrix(l, 1, 2, n, p)(h - 1, h - 1);
        const cd expected = (l == k) ? cd(-1.0) : ratio;
        CAPTURE(n, l, k);
        CHECK(std::abs(entry - expected) < 1e-14);
      }
    }
  }
}

TEST_CASE("permutation decomposition", "[matrices]") {
  const auto pw = decompose_permutation({3, 1, 2});
  CHECK(pw.sigma == std::vector<int>{3, 1, 2});
  CHECK(static_cast<int>(pw.word.size()) == inversions(pw.sigma));
  // replay lands on sigma (a_sigma validates this internally)
  CHECK_NOTHROW(a_sigma(pw, three_points()));

  CHECK(inversions({1, 2, 3}) == 0);
  CHECK(inversions({3, 2, 1}) == 3);
  CHECK(permutation_sign({2, 1, 3}) == -1);
  CHECK(permutation_sign({2, 3, 1}) == 1);
  CHECK_THROWS_AS(decompose_permutation({1, 1, 3}), std::invalid_argument);
  CHECK_THROWS_AS(decompose_permutation({0, 1, 2}), std::invalid_argument);

  const auto id = decompose_permutation({1, 2, 3});
  CHECK(id.word.empty());
  CHECK(max_abs_diff(a_sigma(id, three_points()),
                     Eigen::MatrixXcd::Identity(8, 8)) == 0.0);
}

TEST_CASE("exchange-word independence", "[matrices]") {
  const auto& p = three_points();
  // the two reduced words for the order-reversing permutation
  PermutationWord w1{{3, 2, 1}, {1, 2, 1}};
  PermutationWord w2{{3, 2, 1}, {2, 1, 2}};
  CHECK(max_abs_diff(a_sigma(w1, p), a_sigma(w2, p)) < 1e-12);

  // disjoint exchanges commute
  SpectralPoint p4{{cd(0.2, 0.1), cd(-0.3, 0.2), cd(0.1, -0.35), cd(-0.15, -0.2)}};
  PermutationWord v1{{2, 1, 4, 3}, {1, 3}};
  PermutationWord v2{{2, 1, 4, 3}, {3, 1}};
  CHECK(max_abs_diff(a_sigma(v1, p4), a_sigma(v2, p4)) < 1e-12);

  // a word that does not land on sigma is rejected
  PermutationWord wrong{{3, 2, 1}, {1, 2}};
  CHECK_THROWS_AS(a_sigma(wrong, p), std::invalid_argument);
}

TEST_CASE("closed-form diagonal against the dense product", "[matrices]") {
  const auto& p = three_points();
  std::vector<std::vector<int>> perms{{1, 2, 3}, {2, 1, 3}, {1, 3, 2},
                                      {3, 1, 2}, {2, 3, 1}, {3, 2, 1}};
  for (const auto& sigma : perms) {
    const auto dense = a_sigma(decompose_permutation(sigma), p);
    for (int k = 0; k <= 3; ++k) {
      const int h = h_index(k, 3);
      const cd brute = dense(h - 1, h - 1);
      const cd closed = a_sigma_diag_closed(sigma, k, p);
      CAPTURE(sigma, k);
      CHECK(std::abs(brute - closed) < 1e-13);
    }
  }
}

TEST_CASE("empty and full marked blocks give the same diagonal", "[matrices]") {
  // the exponents differ by a constant shift, which cancels over a permutation
  const auto& p = three_points();
  for (const auto& sigma : {std::vector<int>{2, 3, 1}, std::vector<int>{3, 1, 2}}) {
    const cd lo = a_sigma_diag_closed(sigma, 0, p);
    const cd hi = a_sigma_diag_closed(sigma, 3, p);
    CHECK(std::abs(lo - hi) < 1e-14);
  }
}

TEST_CASE("unmarked diagonal is the product over inverted pairs", "[matrices]") {
  // [A_sigma]_{1,1} multiplies one ratio factor per inversion of sigma
  const auto& p = three_points();
  const std::vector<int> sigma{3, 1, 2};  // inverted pairs {1,3} and {2,3}
  const cd f13 = -(cd(1.0) - p.xi[2]) / (cd(1.0) - p.xi[0]);
  const cd f23 = -(cd(1.0) - p.xi[2]) / (cd(1.0) - p.xi[1]);
  const cd expected = f13 * f23;
  CHECK(std::abs(a_sigma(decompose_permutation(sigma), p)(0, 0) - expected) < 1e-13);
  CHECK(std::abs(a_sigma_diag_closed(sigma, 0, p) - expected) < 1e-13);
}

TEST_CASE("integer complex powers", "[matrices]") {
  const cd z(0.3, -0.7);
  CHECK(cpowi(z, 0) == cd(1.0));
  CHECK(std::abs(cpowi(z, 3) - z * z * z) < 1e-15);
  CHECK(std::abs(cpowi(z, -2) - cd(1.0) / (z * z)) < 1e-15);
}
