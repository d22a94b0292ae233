#include "algoselect/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace algoselect {

const char* to_string(Orientation o) {
  return o == Orientation::maximize ? "maximize" : "minimize";
}

std::uint64_t sample_size(const LearnSpec& spec) {
  if (!(spec.epsilon > 0.0)) throw std::invalid_argument("sample_size: epsilon must be positive");
  if (!(spec.delta > 0.0 && spec.delta <= 1.0)) throw std::invalid_argument("sample_size: delta must lie in (0, 1]");
  if (!(spec.cost_range > 0.0)) throw std::invalid_argument("sample_size: cost range H must be positive");
  if (!(spec.dimension >= 0.0)) throw std::invalid_argument("sample_size: dimension must be non-negative");
  if (!(spec.constant > 0.0)) throw std::invalid_argument("sample_size: constant must be positive");

  const double ratio = spec.cost_range / spec.epsilon;
  const double raw = spec.constant * ratio * ratio * (spec.dimension - std::log(spec.delta));
  if (!std::isfinite(raw) || raw >= 0x1.0p63) throw std::overflow_error("sample_size: result does not fit in 64 bits");
  // Relative slack absorbs round-off in ln(1/delta) for exact-integer cases such as delta = 1/e.
  const double m = std::ceil(raw * (1.0 - 1e-12));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(m));
}

double CostMatrix::row_mean(std::size_t candidate) const {
  if (instances_ == 0) throw std::invalid_argument("row_mean: no instances");
  double sum = 0.0;
  for (double v : row(candidate)) sum += v;
  return sum / static_cast<double>(instances_);
}

CostMatrix CostMatrix::select_instances(std::span<const std::size_t> columns) const {
  CostMatrix out(candidates_, columns.size());
  for (std::size_t r = 0; r < candidates_; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c] >= instances_) throw std::out_of_range("select_instances: column out of range");
      out(r, c) = (*this)(r, columns[c]);
    }
  }
  return out;
}

std::size_t best_row(const CostMatrix& costs, Orientation orientation) {
  if (costs.candidates() == 0) throw std::invalid_argument("erm: empty candidate list");
  if (costs.instances() == 0) throw std::invalid_argument("erm: empty sample set");
  std::size_t best = 0;
  double best_mean = costs.row_mean(0);
  for (std::size_t r = 1; r < costs.candidates(); ++r) {
    const double m = costs.row_mean(r);
    if (better(orientation, m, best_mean)) {
      best = r;
      best_mean = m;
    }
  }
  return best;
}

ErrorReport erm(const CostMatrix& train, Orientation orientation) {
  ErrorReport report;
  report.chosen = best_row(train, orientation);
  report.train_mean = train.row_mean(report.chosen);
  return report;
}

ErrorReport erm(const CostMatrix& train, const CostMatrix& heldout, Orientation orientation) {
  ErrorReport report = erm(train, orientation);
  if (heldout.instances() == 0) return report;
  if (heldout.candidates() != train.candidates())
    throw std::invalid_argument("erm: held-out matrix has a different candidate count");
  const std::size_t best = best_row(heldout, orientation);
  report.heldout_mean = heldout.row_mean(report.chosen);
  report.heldout_best = best;
  report.heldout_best_mean = heldout.row_mean(best);
  report.estimated_error = std::abs(*report.heldout_mean - *report.heldout_best_mean);
  return report;
}

void check_shatter_set_size(std::size_t size, const ShatterOptions& options) {
  if (options.max_set_size > 30) throw std::invalid_argument("shatter_probe: set size cap above 30");
  if (size > options.max_set_size)
    throw std::invalid_argument("shatter_probe: set of size " + std::to_string(size) + " exceeds cap " +
                                std::to_string(options.max_set_size));
}

std::size_t count_labelings(const CostMatrix& costs, std::span<const double> witnesses) {
  if (witnesses.size() != costs.instances()) throw std::invalid_argument("count_labelings: witness count mismatch");
  std::set<std::uint64_t> seen;
  for (std::size_t r = 0; r < costs.candidates(); ++r) {
    std::uint64_t label = 0;
    for (std::size_t i = 0; i < costs.instances(); ++i)
      if (costs(r, i) > witnesses[i]) label |= std::uint64_t{1} << i;
    seen.insert(label);
  }
  return seen.size();
}

namespace {

// Depth-first search over per-instance witness choices. After fixing the first
// k witnesses the rows fall into classes by their k-bit label prefix; the final
// labeling count is at most min(#profiles, #classes * 2^(s-k)), which bounds
// the branch.
class ShatterSearch {
 public:
  ShatterSearch(std::vector<std::vector<double>> profiles, std::vector<std::vector<double>> options)
      : profiles_(std::move(profiles)),
        options_(std::move(options)),
        s_(options_.size()),
        labels_(profiles_.size(), 0),
        chosen_(s_, 0.0) {}

  void run() { descend(0); }

  std::size_t best() const { return best_; }
  const std::vector<double>& best_witnesses() const { return best_witnesses_; }

 private:
  std::size_t distinct_labels() const {
    std::vector<std::uint64_t> tmp = labels_;
    std::sort(tmp.begin(), tmp.end());
    return static_cast<std::size_t>(std::unique(tmp.begin(), tmp.end()) - tmp.begin());
  }

  void descend(std::size_t k) {
    const std::size_t classes = distinct_labels();
    const std::size_t target = std::size_t{1} << s_;
    if (k == s_) {
      if (classes > best_) {
        best_ = classes;
        best_witnesses_ = chosen_;
      }
      return;
    }
    const std::size_t bound = std::min(profiles_.size(), classes << (s_ - k));
    if (bound <= best_ || best_ == target) return;
    for (double w : options_[k]) {
      chosen_[k] = w;
      const std::uint64_t bit = std::uint64_t{1} << k;
      for (std::size_t r = 0; r < profiles_.size(); ++r) {
        if (profiles_[r][k] > w)
          labels_[r] |= bit;
        else
          labels_[r] &= ~bit;
      }
      descend(k + 1);
      if (best_ == target) return;
    }
  }

  std::vector<std::vector<double>> profiles_;
  std::vector<std::vector<double>> options_;
  std::size_t s_;
  std::vector<std::uint64_t> labels_;
  std::vector<double> chosen_;
  std::size_t best_ = 0;
  std::vector<double> best_witnesses_;
};

}  // namespace

ShatterReport shatter_probe(const CostMatrix& costs, const ShatterOptions& options) {
  const std::size_t s = costs.instances();
  check_shatter_set_size(s, options);
  ShatterReport report;
  report.set_size = s;
  if (costs.candidates() == 0) return report;
  if (s == 0) {
    report.labelings = 1;
    report.shattered = true;  // the empty set is trivially shattered
    return report;
  }

  // Candidates with identical cost profiles realize identical labelings.
  std::vector<std::vector<double>> profiles;
  profiles.reserve(costs.candidates());
  for (std::size_t r = 0; r < costs.candidates(); ++r) profiles.emplace_back(costs.row(r).begin(), costs.row(r).end());
  std::sort(profiles.begin(), profiles.end());
  profiles.erase(std::unique(profiles.begin(), profiles.end()), profiles.end());

  std::vector<std::vector<double>> thresholds(s);
  for (std::size_t i = 0; i < s; ++i) {
    std::vector<double> values;
    values.reserve(profiles.size());
    for (const auto& p : profiles) values.push_back(p[i]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (values.size() == 1) {
      thresholds[i].push_back(values.front());
    } else {
      for (std::size_t j = 0; j + 1 < values.size(); ++j) {
        double mid = 0.5 * (values[j] + values[j + 1]);
        if (!(mid < values[j + 1])) mid = values[j];  // adjacent doubles: the lower value separates them
        thresholds[i].push_back(mid);
      }
    }
  }

  ShatterSearch search(std::move(profiles), std::move(thresholds));
  search.run();
  report.labelings = search.best();
  report.shattered = report.labelings == (std::size_t{1} << s);
  if (report.shattered) report.witnesses = search.best_witnesses();
  return report;
}

}  // namespace algoselect
