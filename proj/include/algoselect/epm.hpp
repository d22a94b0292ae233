#pragma once

// Per-instance selection from instance features: linear performance models
// fitted by least squares, and lookup tables over a finite feature domain.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "algoselect/core.hpp"
#include "algoselect/greedy.hpp"

namespace algoselect::epm {

// Row-major samples x d matrix of features.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * dim_, dim_}; }
  void append(std::span<const double> features);

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

template <class X>
struct FeatureMap {
  std::string schema;
  std::size_t dim = 0;
  std::function<std::vector<double>(const X&)> compute;
};

template <class X>
FeatureMatrix feature_matrix(const FeatureMap<X>& map, std::span<const X> instances) {
  FeatureMatrix m(0, map.dim);
  for (const auto& x : instances) m.append(map.compute(x));
  return m;
}

// (1, n, edges / n, mean weight, max weight, mean degree)
inline constexpr const char* kMwisSchema = "mwis-basic-v1";
std::vector<double> mwis_features(const greedy::MwisInstance& instance);
FeatureMap<greedy::MwisInstance> mwis_feature_map();

struct LinearEpm {
  std::string schema;
  std::size_t algorithm = 0;
  std::vector<double> coefficients;
  double training_loss = 0.0;  // mean squared error on the fitting data
  std::size_t rank = 0;        // numerical rank of the feature matrix

  double predict(std::span<const double> features) const;
};

// Minimum-norm least-squares fit of costs against features.
LinearEpm fit_linear_epm(std::size_t algorithm, const FeatureMatrix& features, std::span<const double> costs,
                         std::string schema = "");

double mean_squared_error(const FeatureMatrix& features, std::span<const double> costs, std::span<const double> coefficients);

// Best predicted algorithm; ties go to the smallest index.
std::size_t select_per_instance(std::span<const LinearEpm> models, std::span<const double> features,
                                Orientation orientation);

struct SelectionTable {
  std::vector<std::size_t> choice;  // per feature value
  std::vector<bool> observed;       // false -> default entry 0
  std::size_t unobserved = 0;

  std::size_t select(std::size_t feature_value) const;
};

// `costs` holds algorithms as rows and samples as columns; `values[j]` is the
// feature value of sample j, in [0, domain).
SelectionTable fit_selection_table(std::size_t domain, std::span<const std::size_t> values, const CostMatrix& costs,
                                   Orientation orientation);

std::string to_json(const LinearEpm& model);
LinearEpm linear_epm_from_json(std::string_view text, const std::string& source = "<epm>");

}  // namespace algoselect::epm
