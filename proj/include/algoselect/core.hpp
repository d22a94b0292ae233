#pragma once

// Learning model shared by every algorithm family: cost orientation, the
// uniform-convergence sample size, empirical risk minimization over a finite
// candidate set, and a brute-force pseudo-shattering probe.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "algoselect/parallel.hpp"

namespace algoselect {

enum class Orientation { maximize, minimize };

constexpr bool better(Orientation o, double a, double b) {
  return o == Orientation::maximize ? a > b : a < b;
}

const char* to_string(Orientation o);

// A cost together with the direction in which it is optimized. Values lie in
// [0, H] for the family that produced them.
struct CostValue {
  double value = 0.0;
  Orientation orientation = Orientation::maximize;
};

struct LearnSpec {
  double epsilon = 0.1;     // target error
  double delta = 0.05;      // failure probability, in (0, 1]
  double cost_range = 1.0;  // H: costs lie in [0, H]
  double dimension = 0.0;   // pseudo-dimension (or log2 |A| for finite families)
  double constant = 1.0;    // the unspecified constant of the uniform convergence bound
};

// ceil(c * (H / eps)^2 * (d + ln(1 / delta))), at least 1.
std::uint64_t sample_size(const LearnSpec& spec);

// Costs of a finite candidate set on a list of instances, stored row-major:
// row = candidate index, column = instance.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t candidates, std::size_t instances)
      : candidates_(candidates), instances_(instances), data_(candidates * instances, 0.0) {}

  std::size_t candidates() const noexcept { return candidates_; }
  std::size_t instances() const noexcept { return instances_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t candidate, std::size_t instance) {
    return data_[candidate * instances_ + instance];
  }
  double operator()(std::size_t candidate, std::size_t instance) const {
    return data_[candidate * instances_ + instance];
  }

  std::span<const double> row(std::size_t candidate) const {
    return {data_.data() + candidate * instances_, instances_};
  }

  // Mean over instances, summed left to right.
  double row_mean(std::size_t candidate) const;

  // Sub-matrix restricted to the given instance columns (in that order).
  CostMatrix select_instances(std::span<const std::size_t> columns) const;

 private:
  std::size_t candidates_ = 0;
  std::size_t instances_ = 0;
  std::vector<double> data_;
};

struct ErrorReport {
  std::size_t chosen = 0;
  double train_mean = 0.0;
  // Held-out statistics are present only when a held-out set was supplied.
  std::optional<double> heldout_mean;
  std::optional<std::size_t> heldout_best;
  std::optional<double> heldout_best_mean;
  // |held-out mean of chosen - held-out mean of the best candidate found|; 0 without held-out data.
  double estimated_error = 0.0;
};

// Candidate with the best mean training cost; ties go to the smallest index.
ErrorReport erm(const CostMatrix& train, Orientation orientation);
ErrorReport erm(const CostMatrix& train, const CostMatrix& heldout, Orientation orientation);

// Index of the best row mean (ties -> smallest index).
std::size_t best_row(const CostMatrix& costs, Orientation orientation);

template <class F, class Instance>
concept FiniteFamily = requires(const F& f, std::size_t index, const Instance& x) {
  { f.size() } -> std::convertible_to<std::size_t>;
  { f.cost(index, x) } -> std::convertible_to<double>;
  { f.orientation() } -> std::same_as<Orientation>;
};

// Evaluates every (candidate, instance) pair as an independent parallel map.
template <class Instance, class F>
  requires FiniteFamily<F, Instance>
CostMatrix evaluate_costs(const F& family, std::span<const Instance> instances) {
  const std::size_t rows = family.size();
  const std::size_t cols = instances.size();
  CostMatrix costs(rows, cols);
  parallel_for(rows * cols, [&](std::size_t k) {
    const std::size_t r = k / cols;
    const std::size_t c = k % cols;
    costs(r, c) = static_cast<double>(family.cost(r, instances[c]));
  });
  return costs;
}

template <class Instance, class F>
  requires FiniteFamily<F, Instance>
ErrorReport erm_finite(const F& family, std::span<const Instance> train, std::span<const Instance> heldout = {}) {
  const CostMatrix train_costs = evaluate_costs<Instance>(family, train);
  if (heldout.empty()) return erm(train_costs, family.orientation());
  return erm(train_costs, evaluate_costs<Instance>(family, heldout), family.orientation());
}

struct ShatterOptions {
  std::size_t max_set_size = 4;
};

struct ShatterReport {
  std::size_t set_size = 0;
  bool shattered = false;
  // Per-instance thresholds realizing all 2^s labelings; empty unless shattered.
  std::vector<double> witnesses;
  // Largest number of distinct labelings realized by any witness vector.
  std::size_t labelings = 0;
};

// Probes whether the instances forming the columns of `costs` are
// pseudo-shattered by the candidate rows. Witness candidates per instance are
// the midpoints between consecutive distinct cost values.
ShatterReport shatter_probe(const CostMatrix& costs, const ShatterOptions& options = {});

// Throws std::invalid_argument when a probed set exceeds the configured cap.
void check_shatter_set_size(std::size_t size, const ShatterOptions& options);

// Number of distinct labelings {i : cost(row, i) > witness_i} over the rows.
std::size_t count_labelings(const CostMatrix& costs, std::span<const double> witnesses);

template <class Instance, class F>
  requires FiniteFamily<F, Instance>
std::vector<ShatterReport> shatter_probe(const F& family, std::span<const std::vector<Instance>> sample_sets,
                                         const ShatterOptions& options = {}) {
  std::vector<ShatterReport> reports;
  reports.reserve(sample_sets.size());
  for (const auto& set : sample_sets) {
    check_shatter_set_size(set.size(), options);
    reports.push_back(shatter_probe(evaluate_costs<Instance>(family, std::span<const Instance>(set)), options));
  }
  return reports;
}

}  // namespace algoselect
