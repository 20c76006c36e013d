#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "doctest.h"
#include "qgca/error.hpp"
#include "qgca/quantizer.hpp"

using namespace qgca;

TEST_CASE("online pass hand trace") {
  // 0.0 opens codeword 0; 0.1 is within 0.2 of it and merges; 0.5 is 0.5 away and opens codeword 1.
  const std::vector<double> e{0.0, 0.1, 0.5};
  const auto book = quantize(e, 0.2);
  CHECK(book.codewords == std::vector<double>{0.0, 0.5});
  CHECK(book.counts == std::vector<std::size_t>{2, 1});
  CHECK(book.assignments == std::vector<std::size_t>{0, 0, 1});
  CHECK(book.threshold == 0.2);
}

TEST_CASE("zero threshold keeps distinct values in first-appearance order") {
  const std::vector<double> e{3.0, -1.0, 3.0, 2.5, -1.0, 3.0};
  const auto book = quantize(e, 0.0);
  CHECK(book.codewords == std::vector<double>{3.0, -1.0, 2.5});
  CHECK(book.counts == std::vector<std::size_t>{3, 2, 1});
  for (std::size_t i = 0; i < e.size(); ++i) CHECK(book.codewords[book.assignments[i]] == e[i]);
}

TEST_CASE("constant input collapses to one codeword") {
  const std::vector<double> e(37, 3.7);
  for (double eps : {0.0, 0.1, 5.0}) {
    const auto book = quantize(e, eps);
    CHECK(book.size() == 1);
    CHECK(book.counts.front() == 37);
  }
}

TEST_CASE("equidistant codewords resolve to the lower index") {
  // Codewords 1.0 (index 0) and -1.0 (index 1); 0.0 is 1.0 from both.
  const std::vector<double> e{1.0, -1.0, 0.0};
  const auto book = quantize(e, 1.0);
  CHECK(book.size() == 2);
  CHECK(book.assignments[2] == 0);
  CHECK(book.counts == std::vector<std::size_t>{2, 1});
}

TEST_CASE("merged samples do not move codewords") {
  const std::vector<double> e{0.0, 0.3, 0.3, 0.3};
  const auto book = quantize(e, 0.4);
  CHECK(book.codewords == std::vector<double>{0.0});
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(quantize(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}, 0.1), Error);
  CHECK_THROWS_AS(quantize(std::vector<double>{1.0}, -0.1), Error);
  CHECK(quantize(std::vector<double>{}, 0.1).size() == 0);
}

TEST_CASE("property: coverage, conservation and monotone compression over random inputs") {
  std::mt19937_64 rng(2024);
  const std::vector<double> grid{0.0, 0.01, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2};
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    std::normal_distribution<double> dist(0.0, 0.5 + static_cast<double>(rng() % 5));
    std::vector<double> e(n);
    for (auto& v : e) v = dist(rng);
    if (trial % 4 == 0) {
      // Repeated values exercise exact-match merging.
      for (std::size_t i = 1; i < n; i += 3) e[i] = e[i - 1];
    }

    std::size_t previous = std::numeric_limits<std::size_t>::max();
    for (double eps : grid) {
      const auto book = quantize(e, eps);
      REQUIRE(book.total_count() == n);
      REQUIRE(book.assignments.size() == n);
      REQUIRE(book.size() <= n);
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(e[i] - book.codewords[book.assignments[i]]));
      REQUIRE(worst <= eps);
      REQUIRE(book.size() <= previous);
      previous = book.size();
      if (eps == 0.0) REQUIRE(book.size() == std::set<double>(e.begin(), e.end()).size());
    }
  }
}
