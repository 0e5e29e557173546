#include <doctest.h>

#include <cmath>

#include "tmsat/error.hpp"
#include "tmsat/sorter.hpp"

using namespace tmsat;

TEST_CASE("branch values") {
  for (double eta1 : {0.0, 0.05, 0.3, 0.9}) CHECK(srt_probability(1, 1, {4, 0.9, eta1}) == 0.9);
  const double e = 0.2;
  CHECK(srt_probability(2, 1, {3, 0.9, e}) == doctest::Approx(0.1 * e).epsilon(1e-15));
  CHECK(srt_probability(1, 2, {3, 0.9, e}) == doctest::Approx(e).epsilon(1e-15));
  CHECK(srt_probability(3, 3, {3, 0.9, e}) == doctest::Approx(0.8 * 0.8 * 0.9).epsilon(1e-15));
  CHECK(srt_probability(3, 1, {3, 0.9, e}) == doctest::Approx(0.8 * 0.1 * e).epsilon(1e-15));
  CHECK(srt_probability(2, 3, {3, 0.9, e}) == doctest::Approx(0.8 * e).epsilon(1e-15));
}

TEST_CASE("error-free sorter") {
  const auto m = srt_matrix({5, 0.9, 0.0});
  for (int k = 0; k < 5; ++k)
    for (int j = 0; j < 5; ++j) CHECK(m(k, j) == (k == j ? 0.9 : 0.0));
  CHECK(srt_matrix({1, 0.9, 0.3})(0, 0) == 0.9);
}

TEST_CASE("kernel properties") {
  for (int n : {2, 4, 9}) {
    for (double eta1 = 0.0; eta1 <= 0.9; eta1 += 0.05) {
      const auto m = srt_matrix({n, 0.9, eta1});
      CHECK(m.minCoeff() >= 0.0);
      for (int j = 0; j < n; ++j) CHECK(m.col(j).sum() < 1.0);
    }
  }
  // Unit efficiency: the kernel can be lossless.
  CHECK(srt_matrix(perfect_sorter(4)).isIdentity());
}

TEST_CASE("separability") {
  CHECK(separability({6, 0.9, 0.0}) == 1.0);
  CHECK(separability({6, 0.9, 0.9}) == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(separability({2, 0.9, 0.1}) == doctest::Approx(0.9).epsilon(1e-15));
  double prev = 2.0;
  for (double eta1 = 0.0; eta1 <= 0.9 + 1e-12; eta1 += 0.01) {
    const double s = separability({5, 0.9, std::min(eta1, 0.9)});
    CHECK(s < prev);
    CHECK(s >= 1.0 / 5 - 1e-15);
    prev = s;
  }
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(srt_probability(0, 1, {3, 0.9, 0.1}), Error);
  CHECK_THROWS_AS(srt_probability(1, 4, {3, 0.9, 0.1}), Error);
  CHECK_THROWS_AS(srt_matrix({3, 0.9, 0.95}), Error);
  CHECK_THROWS_AS(srt_matrix({3, 1.1, 0.0}), Error);
  CHECK_THROWS_AS(srt_matrix({0, 0.9, 0.0}), Error);
}
