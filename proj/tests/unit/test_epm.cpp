#include <doctest.h>

#include <cmath>
#include <limits>

#include "algoselect/epm.hpp"
#include "algoselect/error.hpp"
#include "support.hpp"

using namespace algoselect;
using namespace algoselect::epm;

namespace {

// Solves (X^T X) a = X^T y with Gaussian elimination and partial pivoting.
std::vector<double> normal_equations(const FeatureMatrix& X, std::span<const double> y) {
  const std::size_t d = X.dim();
  std::vector<std::vector<long double>> A(d, std::vector<long double>(d + 1, 0.0L));
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) A[i][j] += static_cast<long double>(X(r, i)) * X(r, j);
      A[i][d] += static_cast<long double>(X(r, i)) * y[r];
    }
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    std::swap(A[piv], A[col]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const long double f = A[r][col] / A[col][col];
      for (std::size_t c = col; c <= d; ++c) A[r][c] -= f * A[col][c];
    }
  }
  std::vector<double> a(d);
  for (std::size_t i = 0; i < d; ++i) a[i] = static_cast<double>(A[i][d] / A[i][i]);
  return a;
}

struct Planted {
  FeatureMatrix features;
  std::vector<std::vector<double>> coefficients;  // per algorithm
  CostMatrix costs;                               // algorithms x samples
};

Planted planted(Rng& rng, std::size_t algorithms, std::size_t d, std::size_t samples) {
  Planted p;
  p.features = FeatureMatrix(samples, d);
  for (std::size_t r = 0; r < samples; ++r) {
    p.features(r, 0) = 1.0;
    for (std::size_t c = 1; c < d; ++c) p.features(r, c) = rng.normal();
  }
  p.coefficients.assign(algorithms, std::vector<double>(d));
  for (auto& a : p.coefficients)
    for (auto& v : a) v = rng.uniform(-2.0, 2.0);
  p.costs = CostMatrix(algorithms, samples);
  for (std::size_t k = 0; k < algorithms; ++k)
    for (std::size_t r = 0; r < samples; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += p.coefficients[k][c] * p.features(r, c);
      p.costs(k, r) = s;
    }
  return p;
}

}  // namespace

TEST_CASE("planted coefficients are recovered") {
  Rng rng(11);
  const auto p = planted(rng, 3, 6, 200);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto model = fit_linear_epm(k, p.features, p.costs.row(k), "synthetic");
    REQUIRE(model.coefficients.size() == 6);
    CHECK(model.rank == 6);
    for (std::size_t c = 0; c < 6; ++c) CHECK(std::fabs(model.coefficients[c] - p.coefficients[k][c]) < 1e-9);
    CHECK(model.training_loss < 1e-20);
  }
}

TEST_CASE("noisy fit matches the normal equations") {
  Rng rng(12);
  auto p = planted(rng, 1, 5, 80);
  std::vector<double> y(p.costs.row(0).begin(), p.costs.row(0).end());
  for (auto& v : y) v += rng.normal();
  const auto model = fit_linear_epm(0, p.features, y);
  const auto oracle = normal_equations(p.features, y);
  for (std::size_t c = 0; c < 5; ++c) CHECK(model.coefficients[c] == doctest::Approx(oracle[c]).epsilon(1e-9));
  CHECK(model.training_loss > 0.0);

  const std::vector<double> zero(5, 0.0);
  CHECK(model.training_loss <= mean_squared_error(p.features, y, zero));

  // No perturbation of the minimizer improves the loss.
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a = model.coefficients;
    std::vector<double> dir(5);
    double len = 0.0;
    for (auto& v : dir) {
      v = rng.normal();
      len += v * v;
    }
    len = std::sqrt(len);
    const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
    for (std::size_t c = 0; c < 5; ++c) a[c] += sign * 1e-4 * dir[c] / len;
    CHECK(mean_squared_error(p.features, y, a) >= model.training_loss - 1e-10);
  }
}

TEST_CASE("degenerate and trivial fits") {
  SUBCASE("all-zero feature gives zero coefficient") {
    FeatureMatrix X(4, 1);
    const std::vector<double> y{1.0, 2.0, 3.0, 4.0};
    const auto model = fit_linear_epm(0, X, y);
    CHECK(model.coefficients[0] == 0.0);
    CHECK(model.rank == 0);
    CHECK(model.predict(std::vector<double>{0.0}) == 0.0);
  }
  SUBCASE("constant cost with an intercept") {
    Rng rng(3);
    FeatureMatrix X(10, 3);
    for (std::size_t r = 0; r < 10; ++r) {
      X(r, 0) = 1.0;
      X(r, 1) = rng.normal();
      X(r, 2) = rng.normal();
    }
    const std::vector<double> y(10, 2.5);
    const auto model = fit_linear_epm(0, X, y);
    CHECK(model.coefficients[0] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(std::fabs(model.coefficients[1]) < 1e-12);
    CHECK(std::fabs(model.coefficients[2]) < 1e-12);
  }
  SUBCASE("duplicated column splits the weight evenly") {
    // Minimum-norm solution of y = 2x with two copies of x is (1, 1).
    FeatureMatrix X(5, 2);
    std::vector<double> y(5);
    for (std::size_t r = 0; r < 5; ++r) {
      X(r, 0) = X(r, 1) = static_cast<double>(r + 1);
      y[r] = 2.0 * static_cast<double>(r + 1);
    }
    const auto model = fit_linear_epm(0, X, y);
    CHECK(model.rank == 1);
    CHECK(model.coefficients[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(model.coefficients[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("errors") {
    FeatureMatrix empty(0, 2);
    CHECK_THROWS_AS(fit_linear_epm(0, empty, std::vector<double>{}), std::invalid_argument);
    FeatureMatrix X(2, 1);
    X(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit_linear_epm(0, X, std::vector<double>{1.0, 2.0}), std::invalid_argument);
    FeatureMatrix Y(2, 1);
    CHECK_THROWS_AS(fit_linear_epm(0, Y, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Y.append(std::vector<double>{1.0, 2.0}), std::invalid_argument);
  }
}

TEST_CASE("per-instance selection") {
  SUBCASE("planted predictors pick the true best on held-out samples") {
    Rng rng(21);
    const auto train = planted(rng, 4, 6, 100);
    std::vector<LinearEpm> models;
    for (std::size_t k = 0; k < 4; ++k) models.push_back(fit_linear_epm(k, train.features, train.costs.row(k)));

    // Fresh features, costs from the planted coefficients.
    for (int t = 0; t < 500; ++t) {
      std::vector<double> f(6);
      f[0] = 1.0;
      for (std::size_t c = 1; c < 6; ++c) f[c] = rng.normal();
      std::size_t truth = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < 4; ++k) {
        double s = 0.0;
        for (std::size_t c = 0; c < 6; ++c) s += train.coefficients[k][c] * f[c];
        if (s < best) {
          best = s;
          truth = k;
        }
      }
      CHECK(select_per_instance(models, f, Orientation::minimize) == truth);
    }
  }
  SUBCASE("single and identical predictors") {
    LinearEpm a{"s", 0, {1.0, 2.0}, 0.0, 2};
    const std::vector<double> f{1.0, 1.0};
    CHECK(select_per_instance(std::vector<LinearEpm>{a}, f, Orientation::minimize) == 0);
    CHECK(select_per_instance(std::vector<LinearEpm>{a, a, a}, f, Orientation::minimize) == 0);
    CHECK(select_per_instance(std::vector<LinearEpm>{a, a, a}, f, Orientation::maximize) == 0);
    LinearEpm b{"s", 1, {3.0, 0.0}, 0.0, 2};
    CHECK(select_per_instance(std::vector<LinearEpm>{a, b}, f, Orientation::maximize) == 0);
    CHECK(select_per_instance(std::vector<LinearEpm>{b, a}, f, Orientation::maximize) == 0);
    CHECK_THROWS_AS(select_per_instance(std::vector<LinearEpm>{}, f, Orientation::minimize), std::invalid_argument);
  }
  SUBCASE("constant features reduce to plain ERM") {
    Rng rng(5);
    CostMatrix costs(5, 30);
    for (std::size_t k = 0; k < 5; ++k)
      for (std::size_t j = 0; j < 30; ++j) costs(k, j) = std::floor(rng.uniform(0.0, 4.0));
    FeatureMatrix X(30, 1);
    for (std::size_t r = 0; r < 30; ++r) X(r, 0) = 1.0;
    for (auto o : {Orientation::minimize, Orientation::maximize}) {
      std::vector<LinearEpm> models;
      for (std::size_t k = 0; k < 5; ++k) models.push_back(fit_linear_epm(k, X, costs.row(k)));
      // Predictions equal row means up to rounding; compare against ERM on the same means.
      std::size_t expect = erm(costs, o).chosen;
      CHECK(select_per_instance(models, std::vector<double>{1.0}, o) == expect);
    }
  }
}

TEST_CASE("selection tables") {
  SUBCASE("single feature value equals ERM") {
    Rng rng(8);
    CostMatrix costs(4, 25);
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t j = 0; j < 25; ++j) costs(k, j) = rng.uniform();
    const std::vector<std::size_t> values(25, 0);
    const auto table = fit_selection_table(1, values, costs, Orientation::maximize);
    CHECK(table.select(0) == erm(costs, Orientation::maximize).chosen);
    CHECK(table.unobserved == 0);
  }
  SUBCASE("two values with disjoint winners") {
    // Value 0: algorithm 1 earns 1, algorithm 0 earns 0. Value 1: the reverse.
    Rng rng(9);
    const std::size_t n = 40;
    CostMatrix costs(2, n);
    std::vector<std::size_t> values(n);
    for (std::size_t j = 0; j < n; ++j) {
      values[j] = rng.bernoulli(0.5) ? 1 : 0;
      costs(0, j) = values[j] == 1 ? 1.0 : 0.0;
      costs(1, j) = values[j] == 0 ? 1.0 : 0.0;
    }
    const auto table = fit_selection_table(2, values, costs, Orientation::maximize);
    CHECK(table.select(0) == 1);
    CHECK(table.select(1) == 0);

    double table_total = 0.0;
    for (std::size_t j = 0; j < n; ++j) table_total += costs(table.select(values[j]), j);
    const std::size_t constant = erm(costs, Orientation::maximize).chosen;
    double constant_total = 0.0;
    for (std::size_t j = 0; j < n; ++j) constant_total += costs(constant, j);
    CHECK(table_total == n);
    CHECK(table_total >= constant_total);
  }
  SUBCASE("refinement never loses on the training set") {
    Rng rng(10);
    for (int trial = 0; trial < 20; ++trial) {
      CostMatrix costs(3, 30);
      std::vector<std::size_t> values(30);
      for (std::size_t j = 0; j < 30; ++j) {
        values[j] = rng.below(4);
        for (std::size_t k = 0; k < 3; ++k) costs(k, j) = rng.uniform();
      }
      for (auto o : {Orientation::minimize, Orientation::maximize}) {
        const auto table = fit_selection_table(4, values, costs, o);
        double t = 0.0, c = 0.0;
        const std::size_t constant = erm(costs, o).chosen;
        for (std::size_t j = 0; j < 30; ++j) {
          t += costs(table.select(values[j]), j);
          c += costs(constant, j);
        }
        if (o == Orientation::minimize)
          CHECK(t <= c + 1e-12);
        else
          CHECK(t >= c - 1e-12);
      }
    }
  }
  SUBCASE("unobserved values default to index 0") {
    CostMatrix costs(2, 2);
    costs(1, 0) = costs(1, 1) = 1.0;
    const std::vector<std::size_t> values{0, 0};
    const auto table = fit_selection_table(3, values, costs, Orientation::maximize);
    CHECK(table.select(0) == 1);
    CHECK(table.select(1) == 0);
    CHECK(table.select(2) == 0);
    CHECK(table.observed == std::vector<bool>{true, false, false});
    CHECK(table.unobserved == 2);
  }
  SUBCASE("errors") {
    CostMatrix costs(2, 1);
    CHECK_THROWS_AS(fit_selection_table(0, std::vector<std::size_t>{}, CostMatrix(2, 0), Orientation::minimize),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_selection_table(2, std::vector<std::size_t>{5}, costs, Orientation::minimize),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_selection_table(2, std::vector<std::size_t>{0, 1}, costs, Orientation::minimize),
                    std::invalid_argument);
  }
}

TEST_CASE("MWIS feature map and JSON") {
  using namespace algoselect::greedy;
  const std::vector<Edge> path{{0, 1}, {1, 2}, {2, 3}};
  const auto x = make_mwis(4, path, {0.2, 0.4, 0.6, 0.8});
  const auto f = mwis_features(x);
  REQUIRE(f.size() == 6);
  CHECK(f[0] == 1.0);
  CHECK(f[1] == 4.0);
  CHECK(f[2] == doctest::Approx(0.75));
  CHECK(f[3] == doctest::Approx(0.5));
  CHECK(f[4] == doctest::Approx(0.8));
  CHECK(f[5] == doctest::Approx(1.5));

  Rng rng(4);
  std::vector<MwisInstance> xs;
  for (int i = 0; i < 5; ++i) xs.push_back(testsupport::random_mwis(rng, 6));
  const auto X = feature_matrix(mwis_feature_map(), std::span<const MwisInstance>(xs));
  CHECK(X.rows() == 5);
  CHECK(X.dim() == 6);

  LinearEpm m{kMwisSchema, 2, {0.5, -1.25, 3.0}, 0.125, 3};
  const auto back = linear_epm_from_json(to_json(m));
  CHECK(back.schema == m.schema);
  CHECK(back.algorithm == 2);
  CHECK(back.coefficients == m.coefficients);
  CHECK(back.training_loss == 0.125);
  CHECK_THROWS_AS(linear_epm_from_json("{\"schema\":1}"), ParseError);
}
