#pragma once

#include <cstdint>
#include <span>

namespace algoselect {

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

double mean(std::span<const double> values);

// Percentile bootstrap interval for the mean.
ConfidenceInterval bootstrap_mean_ci(std::span<const double> values, double level = 0.95,
                                     std::size_t resamples = 2000, std::uint64_t seed = 0);

}  // namespace algoselect
