#include "algoselect/epm.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

#include "algoselect/error.hpp"

namespace algoselect::epm {

using json = nlohmann::json;

void FeatureMatrix::append(std::span<const double> features) {
  if (rows_ == 0 && dim_ == 0) dim_ = features.size();
  if (features.size() != dim_)
    throw std::invalid_argument("feature matrix: row of length " + std::to_string(features.size()) + ", expected " +
                                std::to_string(dim_));
  data_.insert(data_.end(), features.begin(), features.end());
  ++rows_;
}

std::vector<double> mwis_features(const greedy::MwisInstance& x) {
  const double n = static_cast<double>(x.size());
  double max_w = 0.0;
  for (double w : x.weights) max_w = std::max(max_w, w);
  const double edges = static_cast<double>(x.graph->edge_count());
  if (x.size() == 0) return {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  return {1.0, n, edges / n, x.total_weight() / n, max_w, 2.0 * edges / n};
}

FeatureMap<greedy::MwisInstance> mwis_feature_map() { return {kMwisSchema, 6, mwis_features}; }

double LinearEpm::predict(std::span<const double> features) const {
  if (features.size() != coefficients.size())
    throw std::invalid_argument("predict: " + std::to_string(features.size()) + " features for a model of dimension " +
                                std::to_string(coefficients.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) s += coefficients[i] * features[i];
  return s;
}

double mean_squared_error(const FeatureMatrix& features, std::span<const double> costs, std::span<const double> a) {
  if (features.rows() == 0) throw std::invalid_argument("mean_squared_error: no samples");
  double s = 0.0;
  for (std::size_t r = 0; r < features.rows(); ++r) {
    double p = 0.0;
    const auto row = features.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) p += a[c] * row[c];
    s += (costs[r] - p) * (costs[r] - p);
  }
  return s / static_cast<double>(features.rows());
}

LinearEpm fit_linear_epm(std::size_t algorithm, const FeatureMatrix& features, std::span<const double> costs,
                         std::string schema) {
  if (features.rows() == 0) throw std::invalid_argument("fit_linear_epm: no samples");
  if (features.dim() == 0) throw std::invalid_argument("fit_linear_epm: empty feature vectors");
  if (costs.size() != features.rows())
    throw std::invalid_argument("fit_linear_epm: " + std::to_string(costs.size()) + " costs for " +
                                std::to_string(features.rows()) + " samples");
  Eigen::MatrixXd X(features.rows(), features.dim());
  Eigen::VectorXd y(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) {
    for (std::size_t c = 0; c < features.dim(); ++c) {
      const double v = features(r, c);
      if (!std::isfinite(v)) throw std::invalid_argument("fit_linear_epm: non-finite feature in sample " + std::to_string(r));
      X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
    if (!std::isfinite(costs[r])) throw std::invalid_argument("fit_linear_epm: non-finite cost in sample " + std::to_string(r));
    y(static_cast<Eigen::Index>(r)) = costs[r];
  }
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
  const Eigen::VectorXd a = cod.solve(y);

  LinearEpm model;
  model.schema = std::move(schema);
  model.algorithm = algorithm;
  model.coefficients.assign(a.data(), a.data() + a.size());
  model.rank = static_cast<std::size_t>(cod.rank());
  model.training_loss = mean_squared_error(features, costs, model.coefficients);
  return model;
}

std::size_t select_per_instance(std::span<const LinearEpm> models, std::span<const double> features,
                                Orientation orientation) {
  if (models.empty()) throw std::invalid_argument("select_per_instance: no models");
  std::size_t best = 0;
  double best_p = models[0].predict(features);
  for (std::size_t i = 1; i < models.size(); ++i) {
    const double p = models[i].predict(features);
    if (better(orientation, p, best_p)) {
      best = i;
      best_p = p;
    }
  }
  return best;
}

std::size_t SelectionTable::select(std::size_t feature_value) const {
  if (feature_value >= choice.size()) throw std::out_of_range("selection table: feature value outside the domain");
  return choice[feature_value];
}

SelectionTable fit_selection_table(std::size_t domain, std::span<const std::size_t> values, const CostMatrix& costs,
                                   Orientation orientation) {
  if (domain == 0) throw std::invalid_argument("fit_selection_table: empty feature domain");
  if (values.size() != costs.instances())
    throw std::invalid_argument("fit_selection_table: feature values and cost columns differ in count");
  if (costs.candidates() == 0) throw std::invalid_argument("fit_selection_table: no algorithms");
  std::vector<std::vector<std::size_t>> groups(domain);
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] >= domain) throw std::invalid_argument("fit_selection_table: feature value outside the domain");
    groups[values[j]].push_back(j);
  }
  SelectionTable table;
  table.choice.assign(domain, 0);
  table.observed.assign(domain, false);
  for (std::size_t v = 0; v < domain; ++v) {
    if (groups[v].empty()) {
      ++table.unobserved;
      continue;
    }
    table.observed[v] = true;
    table.choice[v] = erm(costs.select_instances(groups[v]), orientation).chosen;
  }
  return table;
}

std::string to_json(const LinearEpm& model) {
  return json{{"schema", model.schema},
              {"algorithm", model.algorithm},
              {"coefficients", model.coefficients},
              {"training_loss", model.training_loss},
              {"rank", model.rank}}
             .dump();
}

LinearEpm linear_epm_from_json(std::string_view text, const std::string& source) {
  try {
    const json j = json::parse(text);
    LinearEpm m;
    m.schema = j.at("schema").get<std::string>();
    m.algorithm = j.at("algorithm").get<std::size_t>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.training_loss = j.at("training_loss").get<double>();
    m.rank = j.value("rank", std::size_t{0});
    return m;
  } catch (const json::exception& e) {
    throw ParseError(source, 0, e.what());
  }
}

}  // namespace algoselect::epm
