#include <doctest.h>

#include <cmath>
#include <numeric>

#include "algoselect/core.hpp"
#include "algoselect/random.hpp"
#include "algoselect/stats.hpp"

using namespace algoselect;

namespace {

// Finite family backed by a table: cost(i, x) = table[i][x].
struct TableFamily {
  std::vector<std::vector<double>> table;
  Orientation orient = Orientation::maximize;
  std::size_t size() const { return table.size(); }
  double cost(std::size_t i, const int& x) const { return table[i][static_cast<std::size_t>(x)]; }
  Orientation orientation() const { return orient; }
};

std::vector<int> range(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_CASE("sample size formula") {
  CHECK(sample_size({1.0, std::exp(-1.0), 1.0, 0.0, 1.0}) == 1);
  CHECK(sample_size({0.1, 0.01, 1.0, 10.0, 1.0}) == 1461);
  const LearnSpec base{0.1, 0.05, 1.0, 3.0, 1.0};
  LearnSpec doubled = base;
  doubled.cost_range = 2.0;
  const auto m1 = sample_size(base);
  const auto m2 = sample_size(doubled);
  CHECK(m2 >= 4 * m1 - 4);
  CHECK(m2 <= 4 * m1);
}

TEST_CASE("sample size is monotone") {
  const LearnSpec base{0.2, 0.1, 1.5, 2.0, 1.0};
  auto with = [&](auto f) {
    LearnSpec s = base;
    f(s);
    return sample_size(s);
  };
  const auto m = sample_size(base);
  CHECK(with([](LearnSpec& s) { s.dimension = 5; }) >= m);
  CHECK(with([](LearnSpec& s) { s.cost_range = 3; }) >= m);
  CHECK(with([](LearnSpec& s) { s.epsilon = 0.4; }) <= m);
  CHECK(with([](LearnSpec& s) { s.delta = 0.5; }) <= m);
  CHECK(with([](LearnSpec& s) { s.constant = 2; }) >= m);
}

TEST_CASE("sample size rejects bad specs") {
  CHECK_THROWS_AS(sample_size({0.0, 0.1, 1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(sample_size({-1.0, 0.1, 1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(sample_size({0.1, 0.0, 1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(sample_size({0.1, 1.5, 1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(sample_size({0.1, 0.1, 0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(sample_size({0.1, 0.1, 1, -1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(sample_size({0.1, 0.1, 1, 1, 0}), std::invalid_argument);
  CHECK(sample_size({0.1, 1.0, 1, 0, 1}) == 1);
}

TEST_CASE("erm on a single candidate") {
  TableFamily f{{{0.3, 0.7, 0.2}}};
  const auto xs = range(3);
  const auto r = erm_finite<int>(f, std::span<const int>(xs), std::span<const int>(xs));
  CHECK(r.chosen == 0);
  CHECK(r.train_mean == doctest::Approx(0.4));
  CHECK(r.estimated_error == 0.0);
}

TEST_CASE("erm picks the higher constant") {
  TableFamily f{{{0.5, 0.5}, {1.0, 1.0}}};
  const auto xs = range(2);
  CHECK(erm_finite<int>(f, std::span<const int>(xs)).chosen == 1);
  f.orient = Orientation::minimize;
  CHECK(erm_finite<int>(f, std::span<const int>(xs)).chosen == 0);
}

TEST_CASE("erm ties go to the smallest index") {
  TableFamily f{{{0.1, 0.9}, {0.9, 0.1}, {0.5, 0.5}}};
  const auto xs = range(2);
  CHECK(erm_finite<int>(f, std::span<const int>(xs)).chosen == 0);
}

TEST_CASE("erm matches brute force on random tables") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    TableFamily f;
    f.orient = trial % 2 ? Orientation::minimize : Orientation::maximize;
    f.table.assign(5, std::vector<double>(20));
    for (auto& row : f.table)
      for (auto& v : row) v = std::floor(rng.uniform() * 4.0) / 4.0;  // coarse values create ties
    const auto xs = range(20);
    const auto r = erm_finite<int>(f, std::span<const int>(xs));

    std::size_t best = 0;
    double best_sum = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      double sum = 0;
      for (double v : f.table[i]) sum += v;
      if (i == 0 || (f.orient == Orientation::maximize ? sum > best_sum : sum < best_sum)) {
        best = i;
        best_sum = sum;
      }
    }
    CHECK(r.chosen == best);
    CHECK(r.train_mean == doctest::Approx(best_sum / 20.0));
  }
}

TEST_CASE("erm with held-out data reports the gap to the held-out best") {
  TableFamily f{{{1.0, 0.0, 0.2, 0.2}, {0.0, 0.9, 0.6, 0.6}}};
  const std::vector<int> train{0, 1};
  const std::vector<int> test{2, 3};
  const auto r = erm_finite<int>(f, std::span<const int>(train), std::span<const int>(test));
  CHECK(r.chosen == 0);
  REQUIRE(r.heldout_mean.has_value());
  CHECK(*r.heldout_mean == doctest::Approx(0.2));
  CHECK(*r.heldout_best == 1);
  CHECK(r.estimated_error == doctest::Approx(0.4));
}

TEST_CASE("erm rejects empty inputs") {
  TableFamily empty;
  const auto xs = range(2);
  CHECK_THROWS_AS(erm_finite<int>(empty, std::span<const int>(xs)), std::invalid_argument);
  TableFamily one{{{1.0, 2.0}}};
  CHECK_THROWS_AS(erm_finite<int>(one, std::span<const int>()), std::invalid_argument);
}

TEST_CASE("shatter probe basics") {
  SUBCASE("equal costs on one instance") {
    CostMatrix m(3, 1);
    for (int r = 0; r < 3; ++r) m(r, 0) = 0.5;
    const auto rep = shatter_probe(m);
    CHECK_FALSE(rep.shattered);
    CHECK(rep.labelings == 1);
  }
  SUBCASE("two distinct costs on one instance") {
    CostMatrix m(2, 1);
    m(0, 0) = 0.25;
    m(1, 0) = 0.75;
    const auto rep = shatter_probe(m);
    REQUIRE(rep.shattered);
    REQUIRE(rep.witnesses.size() == 1);
    CHECK(rep.witnesses[0] > 0.25);
    CHECK(rep.witnesses[0] < 0.75);
    CHECK(count_labelings(m, rep.witnesses) == 2);
  }
  SUBCASE("cap") {
    CostMatrix m(2, 5);
    CHECK_THROWS_AS(shatter_probe(m), std::invalid_argument);
    CHECK_NOTHROW(shatter_probe(m, ShatterOptions{5}));
  }
}

TEST_CASE("shatter probe agrees with exhaustive witness search") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t rows = 2 + rng.below(10);
    const std::size_t s = 1 + rng.below(3);
    CostMatrix m(rows, s);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < s; ++c) m(r, c) = static_cast<double>(rng.below(4));

    // Witness thresholds at every half-integer cover all distinct labelings.
    std::size_t best = 0;
    std::vector<double> w(s);
    const std::size_t combos = static_cast<std::size_t>(std::pow(5, s));
    for (std::size_t k = 0; k < combos; ++k) {
      std::size_t t = k;
      for (std::size_t c = 0; c < s; ++c) {
        w[c] = static_cast<double>(t % 5) - 0.5;
        t /= 5;
      }
      best = std::max(best, count_labelings(m, w));
    }
    const auto rep = shatter_probe(m);
    CHECK(rep.labelings == best);
    CHECK(rep.shattered == (best == (std::size_t{1} << s)));
    CHECK(rep.labelings <= std::min<std::size_t>(std::size_t{1} << s, rows));
    if (rep.shattered) CHECK(count_labelings(m, rep.witnesses) == (std::size_t{1} << s));
  }
}

TEST_CASE("random streams") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
  Rng a(3), b(3);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 100; ++i) CHECK(a.below(7) < 7);
}

TEST_CASE("bootstrap interval contains the mean") {
  std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto ci = bootstrap_mean_ci(xs, 0.95, 2000, 1);
  CHECK(ci.lo <= 5.5);
  CHECK(ci.hi >= 5.5);
  CHECK(ci.lo >= 1.0);
  CHECK(ci.hi <= 10.0);
  CHECK(mean(xs) == doctest::Approx(5.5));
}
